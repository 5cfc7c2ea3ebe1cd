#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jones {

inline constexpr const char* kVersion = "jones2d 0.1.0";

/// Error type thrown by all library operations on invalid input or
/// unmet preconditions. The message carries the diagnostic (index,
/// line number, offending value) the caller needs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

/// FNV-1a 64-bit hash, used for provenance hashes embedded in reports.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace jones
