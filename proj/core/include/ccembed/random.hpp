#pragma once

#include <cstdint>
#include <random>

namespace ccembed {

// SplitMix64 finaliser; used to derive independent per-index seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// seed_i = hash(master, i). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

// Seeded random stream. Every sampling helper consumes a fixed number of
// engine outputs, so a seed reproduces the same draws on every platform.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits. Consumes one engine output.
  double uniform() noexcept;
  // Uniform on (0, 1); used by inverse-transform samplers.
  double open_uniform() noexcept;
  double uniform(double low, double high) noexcept;
  // Standard normal via inverse CDF. Consumes one engine output.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace ccembed
