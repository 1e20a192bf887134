#ifndef HOP_RNG_HPP
#define HOP_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace hop {

using Rng = std::mt19937_64;

/// One step of the splitmix64 output function.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

/// FNV-1a; used to turn estimator names into stream ids.
constexpr std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the sub-stream `name` under `master`.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::string_view name) {
  return mix_seed(master, hash_name(name));
}

/// Generator for (seed, trial). Streams for distinct trials are independent
/// for all practical purposes, and the mapping does not depend on which
/// worker runs the trial.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return Rng(mix_seed(seed, trial));
}

/// Uniform double in (0, 1), never exactly 0 or 1.
inline double open_uniform(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace hop

#endif  // HOP_RNG_HPP
