#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcl/core_math.hpp"
#include "dcl/rng.hpp"

namespace dcl {

/// A bit-vector b in {0,1}^k stored as a mask: b_1 is the most significant of
/// the k low bits, so comparing masks is comparing b as a binary integer.
struct BitVector {
  std::uint32_t mask = 0;
  std::uint32_t k = 0;

  std::uint32_t bit(std::uint32_t register_index) const {
    return (mask >> (k - 1 - register_index)) & 1u;
  }
  std::string to_string() const;
  static BitVector parse(const std::string& text);
  static BitVector from_bits(std::span<const std::uint8_t> bits);

  friend bool operator==(const BitVector&, const BitVector&) = default;
};

inline constexpr std::uint32_t kMaxEnumerationRegisters = 24;

/// Weights l in Z_N^k and target p in Z_N.
struct SubsetSumInstance {
  std::vector<std::uint32_t> weights;
  std::uint32_t target = 0;
  std::uint32_t modulus = 2;

  std::uint32_t k() const { return static_cast<std::uint32_t>(weights.size()); }
  double density() const;
  void validate() const;
};

/// b . l mod N.
std::uint32_t subset_sum(std::span<const std::uint32_t> weights, std::uint32_t mask,
                         std::uint32_t modulus);

/// All solutions of an instance in increasing mask order. Solution j of this
/// list is the j-th element of the canonical ordering.
struct SolutionSet {
  SubsetSumInstance instance;
  std::vector<std::uint32_t> solutions;

  std::size_t size() const { return solutions.size(); }
  bool empty() const { return solutions.empty(); }
  std::optional<std::size_t> index_of(std::uint32_t mask) const;
};

SolutionSet enumerate_solutions(const SubsetSumInstance& instance);

/// Solutions for every target at once: result[p] lists T_{l,p} in canonical
/// order. One pass over the 2^k masks.
std::vector<std::vector<std::uint32_t>> solutions_by_target(std::span<const std::uint32_t> weights,
                                                            std::uint32_t modulus);

struct RandomInstance {
  std::vector<std::uint32_t> weights;
  BitVector witness;
  std::uint32_t target = 0;
};

/// l uniform in Z_N^k, b uniform in {0,1}^k, p = b . l mod N.
RandomInstance random_instance(std::uint32_t modulus, std::uint32_t registers, Rng& rng);

/// True iff b' . l == b . l (mod N) and b' != b.
bool verify_collision(std::span<const std::uint32_t> weights, const BitVector& b,
                      const BitVector& b_prime, std::uint32_t modulus);

/// k / log2(N).
double density(std::uint32_t registers, std::uint64_t modulus);

/// ceil(log2 N + c * log2 log2 N), the register count at which collision
/// finding is studied.
std::uint32_t collision_registers(std::uint64_t modulus, double c);

}  // namespace dcl
