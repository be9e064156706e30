#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcl/coset_basis.hpp"
#include "dcl/simulator.hpp"
#include "dcl/subset_sum.hpp"

namespace dcl {

enum class Algorithm { alg1, alg2 };

// canonical: canonical basis, canonical assignment
// random:    alg1 -> canonical basis under a random-permutation assignment;
//            alg2 -> Haar-rotated basis (same as tilde)
// hat:       hat basis; the input b is the first solution b^(0) of its block
// tilde:     Haar-rotated basis seeded by rotation_seed
enum class UnitaryFamily { canonical, random, hat, tilde };

std::string to_string(Algorithm algorithm);
std::string to_string(UnitaryFamily family);
UnitaryFamily parse_family(const std::string& text);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 means the
/// hardware concurrency). Each index is processed exactly once.
void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& body);

struct ExperimentConfig {
  std::uint32_t N = 4;
  std::uint32_t k = 4;  // 0: derive k from c via collision_registers
  double c = 1.0;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 7;
  Algorithm algorithm = Algorithm::alg1;
  UnitaryFamily family = UnitaryFamily::canonical;
  std::uint64_t rotation_seed = 1;
  double sigma = 3.0;
  double exact_tolerance = 1e-12;
  unsigned threads = 0;

  void validate() const;
  std::uint32_t registers() const;
};

enum class PredictionKind { equality, lower_bound };

struct Prediction {
  PredictionKind kind = PredictionKind::equality;
  double value = 0.0;
};

std::string to_string(PredictionKind kind);

/// Success probability the theory assigns to a block with |T| solutions.
Prediction predicted_success(Algorithm algorithm, UnitaryFamily family, std::size_t solution_count);

/// Bases and unitaries for one (config, params) pair, built once and shared
/// read-only between trials.
class CollisionSetup {
 public:
  CollisionSetup(const DihedralParams& params, Algorithm algorithm, UnitaryFamily family,
                 std::uint64_t rotation_seed, std::uint64_t assignment_seed);

  const DihedralParams& params() const noexcept { return params_; }
  Algorithm algorithm() const noexcept { return algorithm_; }
  UnitaryFamily family() const noexcept { return family_; }
  const LabeledBasis& basis() const noexcept { return *basis_; }

  /// The input the experiment actually queries for a drawn (l, b): b itself,
  /// or b^(0) of the same block under the hat family.
  BitVector effective_input(std::span<const std::uint32_t> l, const BitVector& b) const;

  OutcomeDistribution exact(std::span<const std::uint32_t> l, const BitVector& b) const;
  Outcome sample(std::span<const std::uint32_t> l, const BitVector& b, Rng& rng) const;

 private:
  DihedralParams params_;
  Algorithm algorithm_;
  UnitaryFamily family_;
  std::shared_ptr<const LabeledBasis> basis_;
  std::optional<BasisChangeUnitary> us_;
  std::optional<IndicatorUnitary> uc_;
};

struct SuccessCell {
  std::size_t solution_count = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double empirical = 0.0;
  double standard_error = 0.0;  // sqrt(p(1-p)/n) at the empirical rate
  double mean_exact = 0.0;
  double min_exact = 0.0;
  double max_exact = 0.0;
  double null_sigma = 0.0;      // sqrt(sum p_i (1 - p_i)) / n over exact per-trial p_i
  Prediction prediction;
  double max_exact_deviation = 0.0;
  std::optional<double> one_branch_estimate;  // hat family: 1/|T|
  bool exact_pass = false;
  bool sampled_pass = false;

  bool pass() const { return exact_pass && sampled_pass; }
};

struct ExperimentSummary {
  ExperimentConfig config;
  std::uint32_t k = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double mean_exact = 0.0;
  std::vector<SuccessCell> cells;  // ascending |T|
  bool pass = false;
};

/// Draws config.trials random instances, runs the configured algorithm once
/// on each and groups the outcomes by |T|.
ExperimentSummary collision_success_experiment(const ExperimentConfig& config);

struct InstanceCheck {
  std::vector<std::uint32_t> l;
  BitVector b;
  std::size_t solution_count = 0;
  Prediction prediction;
  double exact = 0.0;
  double distribution_total = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t successes = 0;
  double empirical = 0.0;
  double sigma = 0.0;  // sqrt(p(1-p)/samples) at the exact p
  bool exact_pass = false;
  bool sampled_pass = false;
};

/// `instances` random (l, b); for each, the exact distribution and
/// `samples` independent runs of the algorithm on that same input.
std::vector<InstanceCheck> instance_sampling_check(const ExperimentConfig& config, std::size_t instances,
                                                   std::uint64_t samples);

struct ExactCell {
  std::size_t solution_count = 0;
  std::uint64_t inputs = 0;
  Prediction prediction;
  double min_exact = 0.0;
  double max_exact = 0.0;
  double max_deviation = 0.0;  // equality: max |p - value|; lower bound: max(0, value - p)
  std::optional<double> one_branch_estimate;
  bool pass = false;
};

/// Exact success probability for every block (l, p) of the space and every
/// admissible input b in it (only b^(0) for the hat family).
std::vector<ExactCell> exhaustive_exact_check(const CollisionSetup& setup, double tolerance);

struct TildeSweep {
  Algorithm algorithm = Algorithm::alg1;
  std::uint32_t rotations = 0;
  std::vector<ExactCell> cells;  // merged across rotations
  double worst_margin = 0.0;     // min over inputs of exact - bound
  bool pass = false;
};

/// `rotations` Haar-rotated bases seeded from `seed`, each checked
/// exhaustively against the lower bound.
TildeSweep tilde_bound_sweep(const DihedralParams& params, Algorithm algorithm, std::uint32_t rotations,
                             std::uint64_t seed, double tolerance, unsigned threads = 0);

enum class TStatMode { exhaustive, sampled };

std::string to_string(TStatMode mode);

/// Distribution of X = |T_{l, b.l}| - 1 over l.
struct TStatistics {
  std::uint32_t k = 0;
  std::uint32_t N = 0;
  BitVector b;
  TStatMode mode = TStatMode::exhaustive;
  std::uint64_t population = 0;     // number of l values scanned
  std::uint64_t sum = 0;            // sum of X
  std::uint64_t sum_squares = 0;    // sum of X^2
  double mean = 0.0;
  double variance = 0.0;            // population variance
  double expected_mean = 0.0;       // (2^k - 1) / N
  double expected_variance = 0.0;   // (2^k - 1)(1/N - 1/N^2)
  std::uint32_t max = 0;
  std::vector<std::uint64_t> histogram;  // histogram[x] = #l with X = x
};

/// Exhaustive over all N^k values of l, or `samples` uniform draws.
TStatistics t_statistics(std::uint32_t k, std::uint32_t N, const BitVector& b, TStatMode mode,
                         Rng* rng = nullptr, std::uint64_t samples = 0, unsigned threads = 0);

/// Var / t^2 with Var = (2^k - 1)(1/N - 1/N^2).
double chebyshev_bound(std::uint32_t k, std::uint32_t N, double t);

struct TailCheck {
  double t = 0.0;
  double bound = 0.0;
  double tail = 0.0;  // fraction of l with X >= mean + t
  bool pass = false;
};

std::vector<TailCheck> chebyshev_tail_check(const TStatistics& stats, std::span<const double> thresholds);

struct CovarianceReport {
  std::uint32_t k = 0;
  std::uint32_t N = 0;
  BitVector b;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  double max_abs_covariance = 0.0;
  double max_marginal_deviation = 0.0;  // max |P(X_b' = 1) - 1/N|
};

/// Exact covariance of X_b' = [b'.l = b.l] and X_b'' over all l, for up to
/// `pair_count` distinct pairs with b', b'' != b (all pairs when fewer exist).
CovarianceReport covariance_check(std::uint32_t k, std::uint32_t N, const BitVector& b, std::size_t pair_count,
                                  Rng& rng);

struct DcspConfusion {
  DcspParams dcsp;
  std::size_t b0_size = 0;
  double bound = 0.0;           // 1 / 2^(k'+1)
  double exact_uniform = 0.0;   // |B0| / (2N)^k
  std::uint64_t coset_states = 0;
  double min_coset_probability = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t in_c = 0;
  double empirical_uniform = 0.0;
  double standard_error = 0.0;
  double null_sigma = 0.0;      // sqrt(p(1-p)/n) at the exact p
  bool coset_pass = false;
  bool bound_pass = false;
  bool sampled_pass = false;
};

/// Coset column: projection norm of every coset state (or `coset_samples`
/// random ones when nonzero). Standard column: `trials` measurements of
/// uniformly random standard basis states.
DcspConfusion dcsp_confusion(const DcspParams& dcsp, std::uint64_t trials, std::uint64_t seed,
                             std::uint64_t coset_samples = 0, double tolerance = 1e-10, double sigma = 3.0,
                             unsigned threads = 0);

struct DcpRun {
  std::uint32_t d = 0;
  std::uint32_t recovered = 0;
  std::uint64_t states_consumed = 0;
  std::vector<DcpBitTrace> bits;
};

struct DcpDemo {
  std::uint32_t N = 0;
  std::uint32_t kprime = 0;
  std::uint32_t repeats = 0;
  std::vector<DcpRun> runs;
  std::uint64_t recovered = 0;
  double rate = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

DcpDemo dcp_demo(std::uint32_t N, std::uint32_t kprime, std::uint32_t repeats, std::uint32_t runs,
                 std::uint64_t seed, double threshold = 0.9, unsigned threads = 0);

struct ModeEquivalence {
  std::size_t inputs = 0;
  double max_tv_alg1 = 0.0;
  double max_tv_alg2 = 0.0;
  double us_unitarity = 0.0;
  double uc_unitarity = 0.0;
  bool pass = false;
};

/// Label-mode against dense-matrix execution for every (l, b) at `params`,
/// with canonical U_S and U_C.
ModeEquivalence mode_equivalence(const DihedralParams& params, double tolerance = 1e-10);

}  // namespace dcl
