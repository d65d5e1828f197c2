#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace advguard {

// FNV-1a, used for provenance hashes in container manifests.
inline uint64_t fnv1a64(std::span<const unsigned char> bytes,
                        uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64_str(const std::string& s) {
  return fnv1a64({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
}

std::string hex64(uint64_t v);

}  // namespace advguard
