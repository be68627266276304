#include "lmeval/http_backend.hpp"

#include <cstdlib>

#include <fmt/format.h>
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "lmeval/error.hpp"

namespace lmeval {
namespace {

using json = nlohmann::json;

// Splits "scheme://host[:port]/path" into base and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(fmt::format("backend url '{}' has no scheme", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

json request_body(const HttpBackendConfig& config,
                  const BackendRequest& request) {
  json body;
  body["model"] = config.model;
  body["messages"] = json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  body["max_tokens"] = request.max_tokens;
  body["temperature"] = request.temperature;
  if (request.want_logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = request.top_logprobs;
  }
  return body;
}

BackendResponse parse_completion(const std::string& payload,
                                 bool want_logprobs) {
  json j;
  try {
    j = json::parse(payload);
  } catch (const json::exception& e) {
    throw Error(fmt::format("provider payload is not JSON: {}", e.what()));
  }
  try {
    const json& choice = j.at("choices").at(0);
    BackendResponse response;
    response.text = choice.at("message").at("content").get<std::string>();
    if (want_logprobs) {
      if (!choice.contains("logprobs") || choice["logprobs"].is_null()) {
        throw Error("provider payload has no logprobs but they were requested");
      }
      std::vector<TokenLogprobs> positions;
      for (const json& tok : choice["logprobs"].at("content")) {
        TokenLogprobs entry;
        for (const json& top : tok.at("top_logprobs")) {
          entry[top.at("token").get<std::string>()] =
              top.at("logprob").get<double>();
        }
        positions.push_back(std::move(entry));
      }
      response.token_logprobs = std::move(positions);
    }
    validate_response(response);
    return response;
  } catch (const json::exception& e) {
    throw Error(fmt::format("malformed provider payload: {}", e.what()));
  }
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)) {
  std::tie(base_, path_) = split_url(config_.url);
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr) {
      throw Error(fmt::format("environment variable '{}' is not set",
                              config_.api_key_env));
    }
    api_key_ = key;
  }
}

BackendResponse HttpBackend::complete(const BackendRequest& request) {
  validate_request(request);
  // One client per call: httplib clients are not safe for concurrent use.
  httplib::Client client(base_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }
  const std::string body = request_body(config_, request).dump();
  auto result = client.Post(path_, headers, body, "application/json");
  if (!result) {
    throw TransientBackendError(fmt::format(
        "connection to {} failed: {}", base_, httplib::to_string(result.error())));
  }
  if (result->status == 429 || result->status >= 500) {
    throw TransientBackendError(
        fmt::format("provider returned status {}", result->status));
  }
  if (result->status != 200) {
    throw Error(fmt::format("provider returned status {}: {}", result->status,
                            result->body));
  }
  return parse_completion(result->body, request.want_logprobs);
}

}  // namespace lmeval
