#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace credo {

using Seed = std::uint64_t;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent child seed from a parent seed and a named purpose.
/// All randomness in the library flows from one root seed through this
/// function, so streams for different purposes never overlap in use.
constexpr Seed derive_seed(Seed parent, std::string_view purpose, std::uint64_t index = 0) noexcept {
  return mix64(mix64(parent ^ hash_name(purpose)) + mix64(index + 0x632be59bd9b4e019ULL));
}

/// The engine used for every stream.
using Engine = std::mt19937_64;

inline Engine make_engine(Seed seed) { return Engine{mix64(seed)}; }

}  // namespace credo
