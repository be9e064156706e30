#include "dcl/subset_sum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "dcl/core_math.hpp"

namespace dcl {

std::string BitVector::to_string() const {
  std::string s(k, '0');
  for (std::uint32_t i = 0; i < k; ++i) s[i] = bit(i) ? '1' : '0';
  return s;
}

BitVector BitVector::parse(const std::string& text) {
  if (text.empty() || text.size() > 32) throw InvalidArgument("BitVector: need 1..32 bits");
  BitVector b{0, static_cast<std::uint32_t>(text.size())};
  for (char c : text) {
    if (c != '0' && c != '1') throw InvalidArgument("BitVector: expected only '0' and '1'");
    b.mask = (b.mask << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return b;
}

BitVector BitVector::from_bits(std::span<const std::uint8_t> bits) {
  if (bits.size() > 32) throw InvalidArgument("BitVector: more than 32 bits");
  BitVector b{0, static_cast<std::uint32_t>(bits.size())};
  for (std::uint8_t v : bits) {
    if (v > 1) throw InvalidArgument("BitVector: bit values must be 0 or 1");
    b.mask = (b.mask << 1) | v;
  }
  return b;
}

double SubsetSumInstance::density() const { return dcl::density(k(), modulus); }

void SubsetSumInstance::validate() const {
  if (modulus < 2) throw InvalidArgument("SubsetSumInstance: modulus must be >= 2");
  if (weights.empty()) throw InvalidArgument("SubsetSumInstance: need at least one weight");
  if (target >= modulus) throw InvalidArgument("SubsetSumInstance: target out of range");
  for (std::uint32_t w : weights) {
    if (w >= modulus) throw InvalidArgument("SubsetSumInstance: weight out of range");
  }
}

std::uint32_t subset_sum(std::span<const std::uint32_t> weights, std::uint32_t mask,
                         std::uint32_t modulus) {
  const auto k = static_cast<std::uint32_t>(weights.size());
  std::uint64_t acc = 0;
  for (std::uint32_t i = 0; i < k; ++i) {
    if ((mask >> (k - 1 - i)) & 1u) acc += weights[i];
  }
  return static_cast<std::uint32_t>(acc % modulus);
}

std::optional<std::size_t> SolutionSet::index_of(std::uint32_t mask) const {
  auto it = std::lower_bound(solutions.begin(), solutions.end(), mask);
  if (it == solutions.end() || *it != mask) return std::nullopt;
  return static_cast<std::size_t>(it - solutions.begin());
}

SolutionSet enumerate_solutions(const SubsetSumInstance& instance) {
  instance.validate();
  if (instance.k() > kMaxEnumerationRegisters) {
    throw ResourceLimit("enumerate_solutions: k above the brute-force budget of 24");
  }
  SolutionSet out{instance, {}};
  const std::uint32_t count = 1u << instance.k();
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    if (subset_sum(instance.weights, mask, instance.modulus) == instance.target) {
      out.solutions.push_back(mask);
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> solutions_by_target(std::span<const std::uint32_t> weights,
                                                            std::uint32_t modulus) {
  const auto k = static_cast<std::uint32_t>(weights.size());
  if (k > kMaxEnumerationRegisters) {
    throw ResourceLimit("solutions_by_target: k above the brute-force budget of 24");
  }
  std::vector<std::vector<std::uint32_t>> by_target(modulus);
  const std::uint32_t count = 1u << k;
  // sums[mask] extends sums[mask without its lowest set bit].
  std::vector<std::uint32_t> sums(count, 0);
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    const std::uint32_t low = mask & (~mask + 1);
    const auto pos = static_cast<std::uint32_t>(std::countr_zero(low));
    sums[mask] = (sums[mask ^ low] + weights[k - 1 - pos]) % modulus;
  }
  for (std::uint32_t mask = 0; mask < count; ++mask) by_target[sums[mask]].push_back(mask);
  return by_target;
}

RandomInstance random_instance(std::uint32_t modulus, std::uint32_t registers, Rng& rng) {
  if (modulus < 2) throw InvalidArgument("random_instance: modulus must be >= 2");
  if (registers < 1 || registers > 32) throw InvalidArgument("random_instance: k must be in 1..32");
  RandomInstance out;
  out.weights.resize(registers);
  for (auto& w : out.weights) w = static_cast<std::uint32_t>(rng.uniform_below(modulus));
  out.witness.k = registers;
  for (std::uint32_t i = 0; i < registers; ++i) {
    out.witness.mask = (out.witness.mask << 1) | static_cast<std::uint32_t>(rng.uniform_below(2));
  }
  out.target = subset_sum(out.weights, out.witness.mask, modulus);
  return out;
}

bool verify_collision(std::span<const std::uint32_t> weights, const BitVector& b,
                      const BitVector& b_prime, std::uint32_t modulus) {
  if (b.k != weights.size() || b_prime.k != weights.size()) {
    throw InvalidArgument("verify_collision: bit-vector length does not match weights");
  }
  if (b.mask == b_prime.mask) return false;
  return subset_sum(weights, b.mask, modulus) == subset_sum(weights, b_prime.mask, modulus);
}

double density(std::uint32_t registers, std::uint64_t modulus) {
  if (modulus < 2) throw InvalidArgument("density: modulus must be >= 2");
  return static_cast<double>(registers) / std::log2(static_cast<double>(modulus));
}

std::uint32_t collision_registers(std::uint64_t modulus, double c) {
  if (modulus < 4) throw InvalidArgument("collision_registers: need N >= 4 so log log N > 0");
  const double log_n = std::log2(static_cast<double>(modulus));
  const double value = log_n + c * std::log2(log_n);
  // Round away float noise before the ceiling (8 + 3 must give 11, not 12).
  return static_cast<std::uint32_t>(std::ceil(value - 1e-9));
}

}  // namespace dcl
