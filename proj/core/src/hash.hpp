#pragma once

// Internal FNV-1a hashing for fixture keys and config digests.
// Not installed; include from core/src only.

#include <cstdint>
#include <string>
#include <string_view>

#include <fmt/format.h>

namespace lmeval::detail {

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::string fnv1a64_hex(std::string_view data) {
  return fmt::format("{:016x}", fnv1a64(data));
}

}  // namespace lmeval::detail
