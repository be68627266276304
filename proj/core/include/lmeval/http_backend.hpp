#pragma once

#include <string>

#include "lmeval/backend.hpp"

namespace lmeval {

struct HttpBackendConfig {
  std::string url;          // e.g. "https://host:port/v1/chat/completions"
  std::string model;
  std::string api_key_env;  // credential comes from this env var, never config
  int timeout_seconds = 60;
};

/// Chat-completion client over HTTP(S). Connection failures, 429 and 5xx
/// surface as TransientBackendError so a RetryingBackend wrapper can back
/// off; anything else is fatal.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  BackendResponse complete(const BackendRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendConfig config_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
  std::string api_key_;
};

}  // namespace lmeval
