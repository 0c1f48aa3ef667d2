#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace latestop {

// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Combines a base seed with a stream index. For a fixed base, distinct
// indices always give distinct seeds.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(base + mix64(index));
}

// xoshiro256** seeded through splitmix64. All distributions are implemented
// here rather than through <random> so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Uniform on {0, ..., n-1}; n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  double normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace latestop
