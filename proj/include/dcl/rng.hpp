#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace dcl {

/// SplitMix64 finalizer. Used to derive independent per-trial streams.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for trial `index` of stream `stream` under `master`:
///   mix64(mix64(master ^ mix64(stream)) + index * 0x9E3779B97F4A7C15).
/// Serial and parallel runs consume identical streams per trial.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept;

/// Seeded generator with platform-independent distributions. The engine is
/// std::mt19937_64; the distributions are written out here because the
/// standard ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Index i with probability weights[i] / sum(weights). Zero-weight entries
  /// are never returned.
  std::size_t discrete(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dcl
