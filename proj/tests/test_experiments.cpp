#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "dcl/experiments.hpp"

using namespace dcl;

namespace {

// Brute-force X = |T_{l, b.l}| - 1 over every l, straight from the definition.
std::vector<std::uint32_t> brute_force_x(std::uint32_t k, std::uint32_t n, std::uint32_t b) {
  std::vector<std::uint32_t> xs;
  std::uint64_t total = 1;
  for (std::uint32_t i = 0; i < k; ++i) total *= n;
  for (std::uint64_t packed = 0; packed < total; ++packed) {
    const auto l = unpack_ints(packed, n, k);
    const std::uint32_t p = subset_sum(l, b, n);
    std::uint32_t count = 0;
    for (std::uint32_t m = 0; m < (1u << k); ++m) count += subset_sum(l, m, n) == p;
    xs.push_back(count - 1);
  }
  return xs;
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(37, threads, [&](std::uint64_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  parallel_for(0, 4, [](std::uint64_t) { FAIL(); });
}

TEST(Families, RoundTripNames) {
  for (auto f : {UnitaryFamily::canonical, UnitaryFamily::random, UnitaryFamily::hat, UnitaryFamily::tilde}) {
    EXPECT_EQ(parse_family(to_string(f)), f);
  }
  EXPECT_THROW(parse_family("unitary"), InvalidArgument);
}

TEST(Prediction, Formulas) {
  for (std::size_t t = 1; t <= 9; ++t) {
    const double T = double(t);
    const Prediction a1 = predicted_success(Algorithm::alg1, UnitaryFamily::canonical, t);
    EXPECT_EQ(a1.kind, PredictionKind::equality);
    EXPECT_DOUBLE_EQ(a1.value, (T - 1) / T);
    EXPECT_DOUBLE_EQ(predicted_success(Algorithm::alg1, UnitaryFamily::random, t).value, (T - 1) / T);
    const Prediction a2 = predicted_success(Algorithm::alg2, UnitaryFamily::canonical, t);
    EXPECT_EQ(a2.kind, PredictionKind::equality);
    EXPECT_NEAR(a2.value, 2 / T * (1 - 1 / T), 1e-15);
    const Prediction hat = predicted_success(Algorithm::alg1, UnitaryFamily::hat, t);
    EXPECT_NEAR(hat.value, 2 * (T - 1) / (T * T), 1e-15);
    for (auto alg : {Algorithm::alg1, Algorithm::alg2}) {
      const Prediction tilde = predicted_success(alg, UnitaryFamily::tilde, t);
      EXPECT_EQ(tilde.kind, PredictionKind::lower_bound);
      EXPECT_NEAR(tilde.value, 1 / T * (1 - 1 / T), 1e-15);
    }
  }
}

TEST(Config, Validation) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.registers(), 4u);
  c.k = 0;
  c.N = 16;
  c.c = 1.0;
  EXPECT_EQ(c.registers(), collision_registers(16, 1.0));
  ExperimentConfig bad;
  bad.trials = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = ExperimentConfig{};
  bad.N = 1;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = ExperimentConfig{};
  bad.sigma = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Experiment, CanonicalCellsMatchTheirPredictions) {
  ExperimentConfig c;
  c.trials = 4000;
  const ExperimentSummary s = collision_success_experiment(c);
  EXPECT_TRUE(s.pass);
  std::uint64_t trials = 0, successes = 0;
  for (const SuccessCell& cell : s.cells) {
    trials += cell.trials;
    successes += cell.successes;
    EXPECT_LE(cell.max_exact_deviation, 1e-12);
    EXPECT_NEAR(cell.mean_exact, cell.prediction.value, 1e-12);
  }
  EXPECT_EQ(trials, 4000u);
  EXPECT_EQ(successes, s.successes);
  for (std::size_t i = 1; i < s.cells.size(); ++i) EXPECT_LT(s.cells[i - 1].solution_count, s.cells[i].solution_count);
}

TEST(Experiment, ResultIsIndependentOfThreadCount) {
  ExperimentConfig c;
  c.trials = 1500;
  c.algorithm = Algorithm::alg2;
  c.threads = 1;
  const ExperimentSummary a = collision_success_experiment(c);
  c.threads = 3;
  const ExperimentSummary b = collision_success_experiment(c);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_DOUBLE_EQ(a.mean_exact, b.mean_exact);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].successes, b.cells[i].successes);
    EXPECT_EQ(a.cells[i].trials, b.cells[i].trials);
  }
}

TEST(Experiment, StandardErrorShrinksWithTrials) {
  ExperimentConfig c;
  c.trials = 400;
  const double small = collision_success_experiment(c).standard_error;
  c.trials = 6400;
  const double large = collision_success_experiment(c).standard_error;
  EXPECT_LT(large, small / 2.5);
}

TEST(Experiment, HatFamilyUsesFirstSolution) {
  const CollisionSetup setup(DihedralParams(4, 3), Algorithm::alg1, UnitaryFamily::hat, 1, 1);
  const std::vector<std::uint32_t> l = {1, 1, 2};
  // Solutions of b.l = 2 are 001, 110 in canonical order.
  EXPECT_EQ(setup.effective_input(l, BitVector::parse("110")), BitVector::parse("001"));
  EXPECT_NEAR(setup.exact(l, BitVector::parse("110")).success_probability, 2.0 * 1 / 4, 1e-12);
}

TEST(Exhaustive, EveryBlockMatchesItsPrediction) {
  for (auto family : {UnitaryFamily::canonical, UnitaryFamily::hat}) {
    const CollisionSetup setup(DihedralParams(3, 3), Algorithm::alg1, family, 1, 1);
    for (const ExactCell& cell : exhaustive_exact_check(setup, 1e-12)) {
      EXPECT_TRUE(cell.pass) << to_string(family) << " |T|=" << cell.solution_count;
      EXPECT_GT(cell.inputs, 0u);
    }
  }
  const CollisionSetup alg2(DihedralParams(3, 3), Algorithm::alg2, UnitaryFamily::canonical, 1, 1);
  for (const ExactCell& cell : exhaustive_exact_check(alg2, 1e-12)) EXPECT_TRUE(cell.pass);
}

TEST(Tilde, SmallSweepRespectsTheBound) {
  for (auto alg : {Algorithm::alg1, Algorithm::alg2}) {
    const TildeSweep sweep = tilde_bound_sweep(DihedralParams(2, 3), alg, 5, 3, 1e-12, 2);
    EXPECT_TRUE(sweep.pass);
    EXPECT_GE(sweep.worst_margin, -1e-12);
    EXPECT_EQ(sweep.rotations, 5u);
  }
}

TEST(TStatistics, ExhaustiveMatchesBruteForce) {
  const BitVector b = BitVector::parse("111");
  const TStatistics s = t_statistics(3, 4, b, TStatMode::exhaustive);
  const auto xs = brute_force_x(3, 4, b.mask);
  EXPECT_EQ(s.population, 64u);
  std::uint64_t sum = 0, sq = 0;
  std::vector<std::uint64_t> hist(8, 0);
  for (auto x : xs) {
    sum += x;
    sq += x * x;
    hist[x]++;
  }
  EXPECT_EQ(s.sum, sum);
  EXPECT_EQ(s.sum_squares, sq);
  for (std::size_t x = 0; x < s.histogram.size(); ++x) EXPECT_EQ(s.histogram[x], hist[x]);
  EXPECT_DOUBLE_EQ(s.mean, 1.75);
  EXPECT_DOUBLE_EQ(s.expected_mean, 7.0 / 4.0);
  EXPECT_NEAR(s.variance, 7.0 * (0.25 - 1.0 / 16.0), 1e-12);
  EXPECT_NEAR(s.expected_variance, 7.0 * (0.25 - 1.0 / 16.0), 1e-12);
}

TEST(TStatistics, ExactMomentsOverAGrid) {
  Rng rng(8);
  for (std::uint32_t k = 2; k <= 4; ++k) {
    for (std::uint32_t n : {2u, 3u, 5u}) {
      const BitVector b{static_cast<std::uint32_t>(1 + rng.uniform_below((1u << k) - 1)), k};
      const TStatistics s = t_statistics(k, n, b, TStatMode::exhaustive);
      const double m = double((1u << k) - 1);
      EXPECT_NEAR(s.mean, m / n, 1e-12) << k << " " << n;
      EXPECT_NEAR(s.variance, m * (1.0 / n - 1.0 / (double(n) * n)), 1e-12) << k << " " << n;
    }
  }
}

TEST(TStatistics, SampledModeIsCloseToTheMean) {
  Rng rng(9);
  const TStatistics s = t_statistics(6, 5, BitVector::parse("101101"), TStatMode::sampled, &rng, 20000, 2);
  EXPECT_EQ(s.population, 20000u);
  EXPECT_NEAR(s.mean, 63.0 / 5.0, 4 * std::sqrt(s.expected_variance / 20000));
  EXPECT_THROW(t_statistics(3, 4, BitVector::parse("111"), TStatMode::sampled, nullptr, 10), InvalidArgument);
}

TEST(TStatistics, ChebyshevBoundAndTails) {
  EXPECT_NEAR(chebyshev_bound(3, 4, 10), 0.013125, 1e-15);
  const TStatistics s = t_statistics(5, 3, BitVector::parse("11111"), TStatMode::exhaustive);
  const double ts[] = {1, 2, 5, 10};
  const auto tails = chebyshev_tail_check(s, ts);
  ASSERT_EQ(tails.size(), 4u);
  for (const TailCheck& t : tails) {
    EXPECT_TRUE(t.pass);
    EXPECT_LE(t.tail, t.bound + 1e-15);
    EXPECT_DOUBLE_EQ(t.bound, chebyshev_bound(5, 3, t.t));
  }
}

TEST(Covariance, PairwiseIndependence) {
  Rng rng(10);
  const CovarianceReport c = covariance_check(3, 4, BitVector::parse("111"), 100, rng);
  // Seven masks other than b give 7 choose 2 = 21 pairs.
  EXPECT_EQ(c.pairs.size(), 21u);
  EXPECT_EQ(c.max_abs_covariance, 0.0);
  EXPECT_EQ(c.max_marginal_deviation, 0.0);
  Rng rng2(11);
  const CovarianceReport d = covariance_check(4, 5, BitVector::parse("1010"), 20, rng2);
  EXPECT_EQ(d.pairs.size(), 20u);
  EXPECT_EQ(d.max_abs_covariance, 0.0);
}

TEST(Dcsp, ConfusionAtSmallSize) {
  const DcspConfusion c = dcsp_confusion(DcspParams::make(2, 1), 3000, 5);
  EXPECT_TRUE(c.coset_pass);
  EXPECT_TRUE(c.bound_pass);
  EXPECT_TRUE(c.sampled_pass);
  EXPECT_NEAR(c.min_coset_probability, 1.0, 1e-10);
  EXPECT_NEAR(c.exact_uniform, double(c.b0_size) / 64.0, 1e-15);
  EXPECT_EQ(c.trials, 3000u);
  EXPECT_DOUBLE_EQ(c.bound, 0.25);
}

TEST(Dcp, DemoIsDeterministic) {
  const DcpDemo a = dcp_demo(4, 1, 5, 4, 7, 0.5, 1);
  const DcpDemo b = dcp_demo(4, 1, 5, 4, 7, 0.5, 3);
  ASSERT_EQ(a.runs.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.runs[i].d, b.runs[i].d);
    EXPECT_EQ(a.runs[i].recovered, b.runs[i].recovered);
    EXPECT_EQ(a.runs[i].states_consumed, b.runs[i].states_consumed);
  }
  EXPECT_EQ(a.recovered, b.recovered);
}
