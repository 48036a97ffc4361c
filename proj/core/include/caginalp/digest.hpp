#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace caginalp {

/// FNV-1a 64-bit hash; used for config digests and probe input fingerprints.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v);

}  // namespace caginalp
