#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace doslab {

using Rng = std::mt19937_64;

// Stream tags keep the derived seeds of different consumers disjoint.
enum class StreamTag : std::uint64_t {
  kDomain = 1,
  kAgent = 2,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Folds the master seed and a path of indices into one 64-bit seed. The
// result depends only on its arguments, so e.g. agent 3 of run 7 draws the
// same stream regardless of how many other agents or runs exist.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

inline Rng domain_stream(std::uint64_t master, std::uint64_t run) {
  return Rng(derive_seed(master, {static_cast<std::uint64_t>(StreamTag::kDomain), run}));
}

inline Rng agent_stream(std::uint64_t master, std::uint64_t run, std::uint64_t agent) {
  return Rng(derive_seed(master, {static_cast<std::uint64_t>(StreamTag::kAgent), run, agent}));
}

}  // namespace doslab
