#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

namespace fshot::rng {

// Splitmix64 stream. Used everywhere randomness is needed so that sampled
// outputs are identical across platforms and standard-library versions
// (std::uniform_int_distribution makes no such guarantee).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), unbiased via rejection.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) {
        return x % n;
      }
    }
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
  return g.next();
}

// Derives an independent stream from a base seed and a path of indices, so
// that per-fragment sampling does not depend on how many fragments precede it.
inline SplitMix64 derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = seed;
  for (std::uint64_t p : path) {
    h = mix(h, p);
  }
  return SplitMix64(h);
}

// First k entries of a seeded Fisher-Yates shuffle of `items`; k >= size
// yields a full shuffle.
template <typename T>
std::vector<T> sample(std::vector<T> items, std::size_t k, SplitMix64& gen) {
  const std::size_t n = items.size();
  const std::size_t take = k < n ? k : n;
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(gen.bounded(n - i));
    std::swap(items[i], items[j]);
  }
  items.resize(take);
  return items;
}

inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, SplitMix64& gen) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return sample(std::move(idx), k, gen);
}

}  // namespace fshot::rng
