#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rbsim {

using Rng = std::mt19937_64;

// Purpose of a random sub-stream. Distinct tags never share draws.
enum class StreamTag : uint64_t {
  Sequence = 1,
  ShotNoise = 2,
  Measurement = 3,
  Experiment = 4,
};

// SplitMix64 finalizer.
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream keyed by (seed, tag, indices...). The result depends only on the
// key, never on which worker asks for it or in what order.
inline Rng make_stream(uint64_t seed, StreamTag tag, std::initializer_list<uint64_t> indices = {}) {
  uint64_t h = mix64(seed ^ mix64(static_cast<uint64_t>(tag)));
  for (uint64_t i : indices) h = mix64(h ^ mix64(i + 0x632be59bd9b4e019ULL));
  return Rng(h);
}

}  // namespace rbsim
