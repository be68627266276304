#include "lmeval/retry.hpp"

#include <algorithm>
#include <thread>

#include <fmt/format.h>

#include "lmeval/error.hpp"
#include "lmeval/logging.hpp"

namespace lmeval {

RetryingBackend::RetryingBackend(Backend& inner, RetryPolicy policy,
                                 Sleeper sleeper)
    : inner_(inner), policy_(policy), sleeper_(std::move(sleeper)) {
  if (policy_.max_attempts < 1) {
    throw Error("retry policy: max_attempts must be >= 1");
  }
}

BackendResponse RetryingBackend::complete(const BackendRequest& request) {
  auto delay = policy_.base_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      BackendResponse response = inner_.complete(request);
      logging::info("backend_complete",
                    {{"backend", inner_.name()},
                     {"attempts", std::to_string(attempt)}});
      return response;
    } catch (const TransientBackendError& e) {
      if (attempt >= policy_.max_attempts) {
        logging::info("backend_exhausted",
                      {{"backend", inner_.name()},
                       {"attempts", std::to_string(attempt)}});
        throw TransientBackendError(fmt::format(
            "{} (gave up after {} attempts)", e.what(), attempt));
      }
      logging::info("backend_retry",
                    {{"backend", inner_.name()},
                     {"attempt", std::to_string(attempt)},
                     {"delay_ms", std::to_string(delay.count())}});
      if (sleeper_) {
        sleeper_(delay);
      } else {
        std::this_thread::sleep_for(delay);
      }
      delay = std::min(
          std::chrono::milliseconds(static_cast<long>(
              static_cast<double>(delay.count()) * policy_.multiplier)),
          policy_.max_delay);
    }
  }
}

std::string RetryingBackend::name() const {
  return inner_.name() + "+retry";
}

}  // namespace lmeval
