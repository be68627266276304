#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmeval/types.hpp"

namespace lmeval {

struct ChatMessage {
  std::string role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct BackendRequest {
  std::vector<ChatMessage> messages;
  int max_tokens = 256;
  double temperature = 0.0;
  bool want_logprobs = false;
  int top_logprobs = 1;

  bool operator==(const BackendRequest&) const = default;
};

/// Rejects structurally invalid requests (empty messages, non-positive
/// token counts, negative temperature).
void validate_request(const BackendRequest& request);

/// A logprob request must be able to see every score token: top_logprobs
/// has to cover the configured support. Throws before dispatch otherwise.
void check_logprob_capacity(const BackendRequest& request,
                            std::size_t support_size);

/// Per-position map from token string to log-probability (all <= 0).
using TokenLogprobs = std::map<std::string, double>;

struct BackendResponse {
  std::string text;
  std::optional<std::vector<TokenLogprobs>> token_logprobs;

  bool operator==(const BackendResponse&) const = default;
};

void validate_response(const BackendResponse& response);

/// Canonical 16-hex-digit hash of a request; keys mock fixtures and is
/// stable across runs and platforms.
std::string request_hash(const BackendRequest& request);

class Backend {
 public:
  virtual ~Backend() = default;

  /// Sends one request. Implementations must be safe for concurrent
  /// calls. Throws TransientBackendError for retryable failures.
  virtual BackendResponse complete(const BackendRequest& request) = 0;

  virtual std::string name() const = 0;
};

enum class TokenPosition { final_token, first_token };

TokenPosition parse_token_position(std::string_view s);

/// Turns the top-k logprobs at the designated position into a probability
/// distribution over the score support: support-token masses are
/// exponentiated and renormalized, mass on other tokens is discarded.
/// Tokens are matched after whitespace trimming ("␣ 4" matches "4").
ScoreDistribution extract_score_distribution(const BackendResponse& response,
                                             const std::vector<int>& support,
                                             TokenPosition position);

}  // namespace lmeval
