#include "lmeval/backend.hpp"

#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "hash.hpp"
#include "lmeval/error.hpp"

namespace lmeval {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

void validate_request(const BackendRequest& request) {
  if (request.messages.empty()) {
    throw Error("backend request: no messages");
  }
  if (request.max_tokens <= 0) {
    throw Error("backend request: max_tokens must be positive");
  }
  if (request.temperature < 0.0) {
    throw Error("backend request: temperature must be >= 0");
  }
  if (request.top_logprobs <= 0) {
    throw Error("backend request: top_logprobs must be positive");
  }
}

void check_logprob_capacity(const BackendRequest& request,
                            std::size_t support_size) {
  if (!request.want_logprobs) {
    throw Error(
        "backend request: scoring needs token logprobs but the request does "
        "not ask for them");
  }
  if (static_cast<std::size_t>(request.top_logprobs) < support_size) {
    throw Error(fmt::format(
        "backend request: top_logprobs {} cannot cover a score support of "
        "size {}",
        request.top_logprobs, support_size));
  }
}

void validate_response(const BackendResponse& response) {
  if (!response.token_logprobs) return;
  for (std::size_t pos = 0; pos < response.token_logprobs->size(); ++pos) {
    const auto& entry = (*response.token_logprobs)[pos];
    if (entry.empty()) {
      throw Error(fmt::format("backend response: empty logprob map at "
                              "position {}",
                              pos));
    }
    for (const auto& [token, lp] : entry) {
      if (!(lp <= 0.0)) {
        throw Error(fmt::format(
            "backend response: log-probability {} for token '{}' is > 0", lp,
            token));
      }
    }
  }
}

std::string request_hash(const BackendRequest& request) {
  nlohmann::ordered_json j;
  j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  j["max_tokens"] = request.max_tokens;
  j["temperature"] = request.temperature;
  j["want_logprobs"] = request.want_logprobs;
  j["top_logprobs"] = request.top_logprobs;
  return detail::fnv1a64_hex(j.dump());
}

TokenPosition parse_token_position(std::string_view s) {
  if (s == "final_token") return TokenPosition::final_token;
  if (s == "first_token") return TokenPosition::first_token;
  throw Error(fmt::format(
      "unknown token position '{}' (allowed: final_token, first_token)", s));
}

ScoreDistribution extract_score_distribution(const BackendResponse& response,
                                             const std::vector<int>& support,
                                             TokenPosition position) {
  if (!response.token_logprobs || response.token_logprobs->empty()) {
    throw Error("score extraction: response carries no token logprobs");
  }
  const std::size_t idx = position == TokenPosition::first_token
                              ? 0
                              : response.token_logprobs->size() - 1;
  const TokenLogprobs& entry = (*response.token_logprobs)[idx];

  std::vector<double> mass(support.size(), 0.0);
  bool any = false;
  for (const auto& [token, lp] : entry) {
    const std::string_view trimmed = trim(token);
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (trimmed == std::to_string(support[i])) {
        // Sum tokenization variants of the same digit ("4" and " 4").
        mass[i] += std::exp(lp);
        any = true;
        break;
      }
    }
  }
  if (!any) {
    std::string tokens;
    for (const auto& [token, lp] : entry) {
      if (!tokens.empty()) tokens += ", ";
      tokens += fmt::format("'{}'", token);
    }
    throw Error(fmt::format(
        "score extraction: no support token at the {} position (saw: {})",
        position == TokenPosition::first_token ? "first" : "final", tokens));
  }
  double total = 0.0;
  for (double m : mass) total += m;
  for (double& m : mass) m /= total;
  return ScoreDistribution(support, std::move(mass));
}

}  // namespace lmeval
