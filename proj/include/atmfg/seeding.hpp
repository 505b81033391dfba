#pragma once

#include <cstdint>
#include <string_view>

namespace atmfg {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Child seed for a named component and index, so every consumer of the root
// seed gets an independent, reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0) {
  std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001B3ULL;
  return splitmix64(splitmix64(root ^ h) + index);
}

} // namespace atmfg
