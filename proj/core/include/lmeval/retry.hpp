#pragma once

#include <chrono>
#include <functional>

#include "lmeval/backend.hpp"

namespace lmeval {

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds base_delay{100};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{5000};
};

/// Wraps a backend with exponential backoff on TransientBackendError.
/// Attempt counts are emitted as structured log lines ("backend_complete
/// attempts=N"). The sleeper is injectable so tests run without waiting.
class RetryingBackend final : public Backend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  RetryingBackend(Backend& inner, RetryPolicy policy,
                  Sleeper sleeper = nullptr);

  BackendResponse complete(const BackendRequest& request) override;
  std::string name() const override;

 private:
  Backend& inner_;
  RetryPolicy policy_;
  Sleeper sleeper_;
};

}  // namespace lmeval
