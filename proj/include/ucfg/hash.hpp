#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace ucfg {

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
inline std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ucfg
