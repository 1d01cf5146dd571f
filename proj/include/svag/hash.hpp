#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace svag {

// 64-bit FNV-1a. Used for prompt / parameter digests: the digests only need to
// be stable across runs and platforms, not cryptographic, and every run
// cross-checks digests for collisions before using them as keys.
inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string to_hex16(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Digest of a prompt: keyed by benchmark id so identical text under two
// benchmarks never aliases.
inline std::string prompt_digest(std::string_view benchmark_id, std::string_view text) {
  uint64_t h = fnv1a64(benchmark_id);
  h = fnv1a64(std::string_view("\x1f", 1), h);
  h = fnv1a64(text, h);
  return to_hex16(h);
}

}  // namespace svag
