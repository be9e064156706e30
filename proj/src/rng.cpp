#include "dcl/rng.hpp"

#include "dcl/core_math.hpp"

namespace dcl {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) noexcept {
  return mix64(mix64(master ^ mix64(stream)) + index * 0x9E3779B97F4A7C15ull);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::uniform_below: n must be positive");
  // Rejection sampling on the top of the range keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % n;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::discrete(std::span<const double> weights) {
  double total = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw InvalidArgument("Rng::discrete: negative weight");
    if (weights[i] > 0.0) last_positive = i;
    total += weights[i];
  }
  if (last_positive == weights.size()) throw InvalidArgument("Rng::discrete: all weights zero");
  const double u = uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace dcl
