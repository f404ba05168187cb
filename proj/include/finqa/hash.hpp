#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace finqa {

// 64-bit FNV-1a. Stable across platforms and runs; prompt content hashes
// and the mock provider depend on that stability.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

inline std::string content_hash(std::string_view text) { return hex64(fnv1a64(text)); }

}  // namespace finqa
