#pragma once

#include <cstdint>
#include <random>

namespace ddt::rng {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream tags keep the substreams of different pipeline stages apart even
/// when they share a base seed and an index.
enum class Stream : std::uint64_t {
  Permutation = 1,
  NullEnsemble = 2,
  Mixture = 3,
  Replicate = 4,
  BaseNetwork = 5,
  Subject = 6,
  Injection = 7,
  Ddt = 8,
};

constexpr std::uint64_t substream_seed(std::uint64_t base, Stream stream, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(stream))) + index);
}

inline Engine engine(std::uint64_t base, Stream stream, std::uint64_t index) {
  return Engine(substream_seed(base, stream, index));
}

}  // namespace ddt::rng
