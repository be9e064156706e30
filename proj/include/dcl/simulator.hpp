#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dcl/coset_basis.hpp"
#include "dcl/rng.hpp"
#include "dcl/subset_sum.hpp"
#include "dcl/unitaries.hpp"

namespace dcl {

/// Result of one run of a collision-finding algorithm.
struct Outcome {
  BitVector result;
  bool success = false;  // result != input and verify_collision holds
  std::size_t solution_count = 0;
  // Transcript of the intermediate measurement.
  std::optional<std::uint64_t> measured_target;  // algorithm1: standard index after U_S
  std::optional<std::size_t> measured_entry;     // algorithm1: basis entry it maps back to
  std::optional<std::uint32_t> indicator;        // algorithm2: first-qubit outcome
};

/// Exact distribution of the returned bit-vector, with zero entries omitted.
struct OutcomeDistribution {
  BitVector input;
  std::size_t solution_count = 0;
  std::vector<std::pair<std::uint32_t, double>> probabilities;  // sorted by mask
  double success_probability = 0.0;
  double total = 0.0;

  double probability(std::uint32_t mask) const;
};

/// algorithm1: prepare |b, l>, QFT the integer registers, apply U_S, measure
/// in the standard basis, apply U_S^dagger, measure the bit registers.
/// Runs in label mode: the measurement after U_S samples a basis label.
Outcome algorithm1(std::span<const std::uint32_t> l, const BitVector& b, const BasisChangeUnitary& us,
                   Rng& rng);

/// algorithm2: as algorithm1 with U_C, measuring only the indicator qubit.
Outcome algorithm2(std::span<const std::uint32_t> l, const BitVector& b, const IndicatorUnitary& uc,
                   Rng& rng);

/// Exhaustive branch enumeration over the intermediate measurement.
OutcomeDistribution exact_outcome_distribution(std::span<const std::uint32_t> l, const BitVector& b,
                                               const BasisChangeUnitary& us);
OutcomeDistribution exact_outcome_distribution(std::span<const std::uint32_t> l, const BitVector& b,
                                               const IndicatorUnitary& uc);

/// Dense-matrix executions of the same algorithms, for cross-validation.
/// `us` must come from materialize_dense(BasisChangeUnitary), `uc` from
/// materialize_dense(IndicatorUnitary).
OutcomeDistribution dense_algorithm1_distribution(std::span<const std::uint32_t> l, const BitVector& b,
                                                  const Eigen::MatrixXcd& us, const DihedralParams& params);
OutcomeDistribution dense_algorithm2_distribution(std::span<const std::uint32_t> l, const BitVector& b,
                                                  const Eigen::MatrixXcd& uc, const DihedralParams& params);

/// Total-variation distance between two outcome distributions.
double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b);

enum class DcspVerdict { in_c, in_c_perp };

struct DcspResult {
  DcspVerdict verdict = DcspVerdict::in_c;
  double probability_in_c = 0.0;
  DenseState collapsed;
};

/// ||Pi_C state||^2 where C = span(B0). `basis` may be any family; only its
/// m = 0 entries are used.
double coset_space_probability(const DenseState& state, const LabeledBasis& basis);

/// Projective measurement {Pi_C, Pi_C-perp} on a unit-norm standard-frame state.
DcspResult dcsp_measure(const DenseState& state, const LabeledBasis& basis, Rng& rng);

/// k = ceil(log2 2N) + k'.
struct DcspParams {
  DihedralParams params;
  std::uint32_t kprime;

  static DcspParams make(std::uint32_t modulus, std::uint32_t kprime);
  /// 1 / 2^(k'+1).
  double uniform_input_bound() const;
};

/// Source of fresh single-register coset states (|0,x> + |1,x+d>)/sqrt2 with
/// uniform x and a hidden d. Each state is 2N amplitudes indexed b * N + x.
class CosetStateOracle {
 public:
  CosetStateOracle(std::uint32_t modulus, std::uint32_t hidden_d, std::uint64_t seed,
                   std::uint64_t state_budget);

  std::vector<Complex> next();
  std::uint32_t modulus() const noexcept { return modulus_; }
  std::uint64_t consumed() const noexcept { return consumed_; }

 private:
  std::uint32_t modulus_;
  std::uint32_t hidden_d_;
  Rng rng_;
  std::uint64_t budget_;
  std::uint64_t consumed_ = 0;
};

struct DcpBitTrace {
  std::uint32_t bit = 0;
  std::uint32_t votes_in_c = 0;
  std::uint32_t votes_perp = 0;
};

struct DcpResult {
  std::uint32_t recovered = 0;
  std::vector<DcpBitTrace> bits;  // least significant first
  std::uint64_t states_consumed = 0;
};

/// Recovers d bit by bit. For bit i: subtract the known low bits of d from the
/// integer register where the bit register is 1, measure bit i of every
/// integer register, then ask the DCSP measurement whether the k-register
/// state is still a coset state. Each bit is a strict majority over `repeats`
/// calls; a tie adds one more call. Requires N to be a power of 2. Throws
/// ResourceLimit when the oracle runs out of states.
DcpResult dcp_solve(CosetStateOracle& oracle, const DcspParams& dcsp, std::uint32_t repeats, Rng& rng,
                    const LabeledBasis* b0 = nullptr);

}  // namespace dcl
