#include "dcl/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

namespace dcl {
namespace {

// Stream identifiers for derive_seed. Each random quantity draws from its own
// stream so that changing one part of an experiment leaves the others alone.
constexpr std::uint64_t kStreamInstance = 1;
constexpr std::uint64_t kStreamRun = 2;
constexpr std::uint64_t kStreamAssignment = 3;
constexpr std::uint64_t kStreamRotation = 4;
constexpr std::uint64_t kStreamSamples = 5;
constexpr std::uint64_t kStreamDcspUniform = 6;
constexpr std::uint64_t kStreamDcspCoset = 7;
constexpr std::uint64_t kStreamDcp = 8;

constexpr double kInf = std::numeric_limits<double>::infinity();

double exact_ratio(__int128 num, __int128 den) {
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

// Subset sums of every mask for weights l, in the mask layout of BitVector.
void all_subset_sums(std::span<const std::uint32_t> l, std::uint32_t modulus, std::vector<std::uint32_t>& sums) {
  const auto k = static_cast<std::uint32_t>(l.size());
  sums.assign(std::size_t{1} << k, 0);
  for (std::uint32_t mask = 1; mask < sums.size(); ++mask) {
    const auto q = static_cast<std::uint32_t>(std::countr_zero(mask));
    sums[mask] = (sums[mask & (mask - 1)] + l[k - 1 - q]) % modulus;
  }
}

// Advances l to the next value in packed order (last register fastest).
void increment(std::vector<std::uint32_t>& l, std::uint32_t modulus) {
  for (std::size_t i = l.size(); i-- > 0;) {
    if (++l[i] < modulus) return;
    l[i] = 0;
  }
}

void check_exhaustive_budget(std::uint32_t k, std::uint32_t N) {
  if (k < 1 || N < 2) throw InvalidArgument("exhaustive scan: need k >= 1 and N >= 2");
  if (k > kMaxEnumerationRegisters) throw ResourceLimit("exhaustive scan: 2^k exceeds the enumeration limit");
  const double population = std::pow(static_cast<double>(N), static_cast<double>(k));
  if (population > static_cast<double>(amplitude_budget())) {
    throw ResourceLimit("exhaustive scan: N^k exceeds the amplitude budget");
  }
}

void merge_cell(ExactCell& into, const ExactCell& from) {
  into.inputs += from.inputs;
  into.min_exact = std::min(into.min_exact, from.min_exact);
  into.max_exact = std::max(into.max_exact, from.max_exact);
  into.max_deviation = std::max(into.max_deviation, from.max_deviation);
  into.pass = into.pass && from.pass;
}

}  // namespace

std::string to_string(Algorithm algorithm) { return algorithm == Algorithm::alg1 ? "alg1" : "alg2"; }

std::string to_string(UnitaryFamily family) {
  switch (family) {
    case UnitaryFamily::canonical: return "canonical";
    case UnitaryFamily::random: return "random";
    case UnitaryFamily::hat: return "hat";
    case UnitaryFamily::tilde: return "tilde";
  }
  return "unknown";
}

UnitaryFamily parse_family(const std::string& text) {
  if (text == "canonical") return UnitaryFamily::canonical;
  if (text == "random") return UnitaryFamily::random;
  if (text == "hat") return UnitaryFamily::hat;
  if (text == "tilde") return UnitaryFamily::tilde;
  throw InvalidArgument("unknown unitary family: " + text);
}

std::string to_string(PredictionKind kind) {
  return kind == PredictionKind::equality ? "equality" : "lower_bound";
}

std::string to_string(TStatMode mode) { return mode == TStatMode::exhaustive ? "exhaustive" : "sampled"; }

void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidArgument("experiment: trials must be >= 1");
  if (sigma <= 0.0 || exact_tolerance <= 0.0) throw InvalidArgument("experiment: tolerances must be positive");
  if (N < 2) throw InvalidArgument("experiment: N must be >= 2");
  if (k == 0 && c < 0.0) throw InvalidArgument("experiment: c must be non-negative");
}

std::uint32_t ExperimentConfig::registers() const { return k != 0 ? k : collision_registers(N, c); }

Prediction predicted_success(Algorithm algorithm, UnitaryFamily family, std::size_t solution_count) {
  const double t = static_cast<double>(solution_count);
  if (family == UnitaryFamily::tilde || (algorithm == Algorithm::alg2 && family == UnitaryFamily::random)) {
    return {PredictionKind::lower_bound, (1.0 / t) * (1.0 - 1.0 / t)};
  }
  if (algorithm == Algorithm::alg2) return {PredictionKind::equality, (2.0 / t) * (1.0 - 1.0 / t)};
  if (family == UnitaryFamily::hat) return {PredictionKind::equality, 2.0 * (t - 1.0) / (t * t)};
  return {PredictionKind::equality, (t - 1.0) / t};
}

CollisionSetup::CollisionSetup(const DihedralParams& params, Algorithm algorithm, UnitaryFamily family,
                               std::uint64_t rotation_seed, std::uint64_t assignment_seed)
    : params_(params), algorithm_(algorithm), family_(family) {
  const bool rotated =
      family == UnitaryFamily::tilde || (algorithm == Algorithm::alg2 && family == UnitaryFamily::random);
  if (family == UnitaryFamily::hat) {
    basis_ = std::make_shared<const LabeledBasis>(build_hat_basis(params));
  } else if (rotated) {
    basis_ = std::make_shared<const LabeledBasis>(build_tilde_basis(params, random_rotation(rotation_seed)));
  } else {
    basis_ = std::make_shared<const LabeledBasis>(enumerate_basis(params));
  }
  if (algorithm == Algorithm::alg2) {
    uc_.emplace(build_UC(basis_));
  } else if (family == UnitaryFamily::hat) {
    us_.emplace(build_US(basis_, AssignmentStrategy::adversarial));
  } else if (family == UnitaryFamily::random) {
    Rng rng(assignment_seed);
    us_.emplace(build_US(basis_, AssignmentStrategy::random_permutation, &rng));
  } else {
    us_.emplace(build_US(basis_, AssignmentStrategy::canonical));
  }
}

BitVector CollisionSetup::effective_input(std::span<const std::uint32_t> l, const BitVector& b) const {
  if (family_ != UnitaryFamily::hat) return b;
  const SolutionBlock* block = basis_->find_block(pack_ints(l, params_.N()), subset_sum(l, b.mask, params_.N()));
  if (block == nullptr) throw InvalidArgument("effective_input: no block for (l, b)");
  return BitVector{block->solutions.front(), b.k};
}

OutcomeDistribution CollisionSetup::exact(std::span<const std::uint32_t> l, const BitVector& b) const {
  return us_ ? exact_outcome_distribution(l, b, *us_) : exact_outcome_distribution(l, b, *uc_);
}

Outcome CollisionSetup::sample(std::span<const std::uint32_t> l, const BitVector& b, Rng& rng) const {
  return us_ ? algorithm1(l, b, *us_, rng) : algorithm2(l, b, *uc_, rng);
}

ExperimentSummary collision_success_experiment(const ExperimentConfig& config) {
  config.validate();
  const DihedralParams params(config.N, config.registers());
  const CollisionSetup setup(params, config.algorithm, config.family, config.rotation_seed,
                             derive_seed(config.seed, kStreamAssignment, 0));

  struct Record {
    std::size_t solution_count = 0;
    double exact = 0.0;
    double total = 0.0;
    bool success = false;
  };
  std::vector<Record> records(config.trials);
  parallel_for(config.trials, config.threads, [&](std::uint64_t i) {
    Rng draw(derive_seed(config.seed, kStreamInstance, i));
    const RandomInstance inst = random_instance(params.N(), params.k(), draw);
    const BitVector b = setup.effective_input(inst.weights, inst.witness);
    const OutcomeDistribution dist = setup.exact(inst.weights, b);
    Rng run(derive_seed(config.seed, kStreamRun, i));
    const Outcome outcome = setup.sample(inst.weights, b, run);
    records[i] = {dist.solution_count, dist.success_probability, dist.total, outcome.success};
  });

  struct Acc {
    std::uint64_t n = 0, successes = 0;
    double sum_p = 0.0, sum_var = 0.0, min_p = kInf, max_p = -kInf, max_dev = 0.0, max_total_dev = 0.0;
  };
  std::map<std::size_t, Acc> acc;
  ExperimentSummary summary;
  summary.config = config;
  summary.k = params.k();
  for (const Record& r : records) {
    Acc& a = acc[r.solution_count];
    const Prediction pred = predicted_success(config.algorithm, config.family, r.solution_count);
    ++a.n;
    a.successes += r.success ? 1 : 0;
    a.sum_p += r.exact;
    a.sum_var += r.exact * (1.0 - r.exact);
    a.min_p = std::min(a.min_p, r.exact);
    a.max_p = std::max(a.max_p, r.exact);
    const double dev = pred.kind == PredictionKind::equality ? std::abs(r.exact - pred.value)
                                                             : std::max(0.0, pred.value - r.exact);
    a.max_dev = std::max(a.max_dev, dev);
    a.max_total_dev = std::max(a.max_total_dev, std::abs(r.total - 1.0));
    summary.successes += r.success ? 1 : 0;
    summary.mean_exact += r.exact;
  }
  summary.trials = config.trials;
  const auto n_all = static_cast<double>(config.trials);
  summary.empirical = static_cast<double>(summary.successes) / n_all;
  summary.standard_error = std::sqrt(summary.empirical * (1.0 - summary.empirical) / n_all);
  summary.mean_exact /= n_all;

  summary.pass = true;
  for (const auto& [t, a] : acc) {
    SuccessCell cell;
    cell.solution_count = t;
    cell.trials = a.n;
    cell.successes = a.successes;
    const auto n = static_cast<double>(a.n);
    cell.empirical = static_cast<double>(a.successes) / n;
    cell.standard_error = std::sqrt(cell.empirical * (1.0 - cell.empirical) / n);
    cell.mean_exact = a.sum_p / n;
    cell.min_exact = a.min_p;
    cell.max_exact = a.max_p;
    cell.null_sigma = std::sqrt(std::max(0.0, a.sum_var)) / n;
    cell.prediction = predicted_success(config.algorithm, config.family, t);
    cell.max_exact_deviation = a.max_dev;
    if (config.family == UnitaryFamily::hat && config.algorithm == Algorithm::alg1) {
      cell.one_branch_estimate = 1.0 / static_cast<double>(t);
    }
    cell.exact_pass = a.max_dev <= config.exact_tolerance && a.max_total_dev <= config.exact_tolerance;
    const double slack = config.sigma * cell.null_sigma + config.exact_tolerance;
    if (cell.prediction.kind == PredictionKind::equality) {
      cell.sampled_pass = std::abs(cell.empirical - cell.mean_exact) <= slack;
    } else {
      cell.sampled_pass = cell.empirical >= cell.prediction.value - slack;
    }
    summary.pass = summary.pass && cell.pass();
    summary.cells.push_back(cell);
  }
  return summary;
}

std::vector<InstanceCheck> instance_sampling_check(const ExperimentConfig& config, std::size_t instances,
                                                   std::uint64_t samples) {
  config.validate();
  if (samples < 1) throw InvalidArgument("instance_sampling_check: samples must be >= 1");
  const DihedralParams params(config.N, config.registers());
  const CollisionSetup setup(params, config.algorithm, config.family, config.rotation_seed,
                             derive_seed(config.seed, kStreamAssignment, 0));
  std::vector<InstanceCheck> checks(instances);
  parallel_for(instances, config.threads, [&](std::uint64_t i) {
    Rng draw(derive_seed(config.seed, kStreamInstance, i));
    const RandomInstance inst = random_instance(params.N(), params.k(), draw);
    InstanceCheck& c = checks[i];
    c.l = inst.weights;
    c.b = setup.effective_input(inst.weights, inst.witness);
    const OutcomeDistribution dist = setup.exact(c.l, c.b);
    c.solution_count = dist.solution_count;
    c.prediction = predicted_success(config.algorithm, config.family, c.solution_count);
    c.exact = dist.success_probability;
    c.distribution_total = dist.total;
    const double dev = c.prediction.kind == PredictionKind::equality ? std::abs(c.exact - c.prediction.value)
                                                                     : std::max(0.0, c.prediction.value - c.exact);
    c.exact_pass = dev <= config.exact_tolerance && std::abs(dist.total - 1.0) <= config.exact_tolerance;
    c.samples = samples;
    for (std::uint64_t s = 0; s < samples; ++s) {
      Rng run(derive_seed(derive_seed(config.seed, kStreamSamples, i), kStreamRun, s));
      c.successes += setup.sample(c.l, c.b, run).success ? 1 : 0;
    }
    const auto n = static_cast<double>(samples);
    c.empirical = static_cast<double>(c.successes) / n;
    c.sigma = std::sqrt(std::max(0.0, c.exact * (1.0 - c.exact)) / n);
    c.sampled_pass = std::abs(c.empirical - c.exact) <= config.sigma * c.sigma + config.exact_tolerance;
  });
  return checks;
}

std::vector<ExactCell> exhaustive_exact_check(const CollisionSetup& setup, double tolerance) {
  const DihedralParams& params = setup.params();
  std::map<std::size_t, ExactCell> cells;
  for (const SolutionBlock& block : setup.basis().blocks()) {
    const std::size_t t = block.solutions.size();
    ExactCell& cell = cells[t];
    if (cell.inputs == 0) {
      cell.solution_count = t;
      cell.prediction = predicted_success(setup.algorithm(), setup.family(), t);
      cell.min_exact = kInf;
      cell.max_exact = -kInf;
      cell.pass = true;
      if (setup.family() == UnitaryFamily::hat && setup.algorithm() == Algorithm::alg1) {
        cell.one_branch_estimate = 1.0 / static_cast<double>(t);
      }
    }
    const std::vector<std::uint32_t> l = unpack_ints(block.l, params.N(), params.k());
    const std::size_t anchors = setup.family() == UnitaryFamily::hat ? 1 : t;
    for (std::size_t j = 0; j < anchors; ++j) {
      const OutcomeDistribution dist = setup.exact(l, BitVector{block.solutions[j], params.k()});
      const double p = dist.success_probability;
      const double dev = cell.prediction.kind == PredictionKind::equality ? std::abs(p - cell.prediction.value)
                                                                          : std::max(0.0, cell.prediction.value - p);
      ++cell.inputs;
      cell.min_exact = std::min(cell.min_exact, p);
      cell.max_exact = std::max(cell.max_exact, p);
      cell.max_deviation = std::max(cell.max_deviation, dev);
      cell.pass = cell.pass && dev <= tolerance && std::abs(dist.total - 1.0) <= tolerance;
    }
  }
  std::vector<ExactCell> out;
  for (auto& [t, cell] : cells) out.push_back(cell);
  return out;
}

TildeSweep tilde_bound_sweep(const DihedralParams& params, Algorithm algorithm, std::uint32_t rotations,
                             std::uint64_t seed, double tolerance, unsigned threads) {
  std::vector<std::vector<ExactCell>> per_rotation(rotations);
  parallel_for(rotations, threads, [&](std::uint64_t r) {
    const CollisionSetup setup(params, algorithm, UnitaryFamily::tilde, derive_seed(seed, kStreamRotation, r), 0);
    per_rotation[r] = exhaustive_exact_check(setup, tolerance);
  });
  TildeSweep sweep;
  sweep.algorithm = algorithm;
  sweep.rotations = rotations;
  sweep.worst_margin = kInf;
  std::map<std::size_t, ExactCell> merged;
  for (const auto& cells : per_rotation) {
    for (const ExactCell& cell : cells) {
      auto [it, inserted] = merged.try_emplace(cell.solution_count, cell);
      if (!inserted) merge_cell(it->second, cell);
      sweep.worst_margin = std::min(sweep.worst_margin, cell.min_exact - cell.prediction.value);
    }
  }
  sweep.pass = rotations > 0;
  for (auto& [t, cell] : merged) {
    sweep.pass = sweep.pass && cell.pass;
    sweep.cells.push_back(cell);
  }
  return sweep;
}

TStatistics t_statistics(std::uint32_t k, std::uint32_t N, const BitVector& b, TStatMode mode, Rng* rng,
                         std::uint64_t samples, unsigned threads) {
  if (b.k != k) throw InvalidArgument("t_statistics: b must have k bits");
  if (k < 1 || N < 2) throw InvalidArgument("t_statistics: need k >= 1 and N >= 2");
  if (k > kMaxEnumerationRegisters) throw ResourceLimit("t_statistics: 2^k exceeds the enumeration limit");
  TStatistics stats;
  stats.k = k;
  stats.N = N;
  stats.b = b;
  stats.mode = mode;
  const std::uint32_t masks = 1u << k;

  auto count_one = [&](std::span<const std::uint32_t> l, std::vector<std::uint32_t>& sums) {
    all_subset_sums(l, N, sums);
    const std::uint32_t target = sums[b.mask];
    return static_cast<std::uint32_t>(std::count(sums.begin(), sums.end(), target)) - 1;
  };

  std::vector<std::uint64_t> histogram(masks, 0);
  if (mode == TStatMode::exhaustive) {
    check_exhaustive_budget(k, N);
    const auto population = static_cast<std::uint64_t>(std::llround(std::pow(double(N), double(k))));
    const std::uint64_t chunks = std::min<std::uint64_t>(population, 64);
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(masks, 0));
    parallel_for(chunks, threads, [&](std::uint64_t c) {
      const std::uint64_t begin = population * c / chunks;
      const std::uint64_t end = population * (c + 1) / chunks;
      std::vector<std::uint32_t> l = unpack_ints(begin, N, k);
      std::vector<std::uint32_t> sums;
      for (std::uint64_t v = begin; v < end; ++v) {
        ++partial[c][count_one(l, sums)];
        increment(l, N);
      }
    });
    for (const auto& h : partial) {
      for (std::uint32_t x = 0; x < masks; ++x) histogram[x] += h[x];
    }
    stats.population = population;
  } else {
    if (rng == nullptr || samples < 1) throw InvalidArgument("t_statistics: sampled mode needs an rng and samples");
    std::vector<std::uint32_t> l(k), sums;
    for (std::uint64_t s = 0; s < samples; ++s) {
      for (auto& x : l) x = static_cast<std::uint32_t>(rng->uniform_below(N));
      ++histogram[count_one(l, sums)];
    }
    stats.population = samples;
  }

  for (std::uint32_t x = 0; x < masks; ++x) {
    if (histogram[x] == 0) continue;
    stats.sum += histogram[x] * x;
    stats.sum_squares += histogram[x] * x * x;
    stats.max = x;
  }
  histogram.resize(stats.max + 1);
  stats.histogram = std::move(histogram);
  const auto n = static_cast<__int128>(stats.population);
  stats.mean = exact_ratio(static_cast<__int128>(stats.sum), n);
  stats.variance = exact_ratio(n * static_cast<__int128>(stats.sum_squares) -
                                   static_cast<__int128>(stats.sum) * static_cast<__int128>(stats.sum),
                               n * n);
  const double m = static_cast<double>(masks - 1);
  stats.expected_mean = m / N;
  stats.expected_variance = m * (1.0 / N - 1.0 / (static_cast<double>(N) * N));
  return stats;
}

double chebyshev_bound(std::uint32_t k, std::uint32_t N, double t) {
  if (!(t > 0.0)) throw InvalidArgument("chebyshev_bound: t must be positive");
  if (N < 2 || k < 1 || k > 63) throw InvalidArgument("chebyshev_bound: need k in [1, 63] and N >= 2");
  const double var = (std::ldexp(1.0, static_cast<int>(k)) - 1.0) * (1.0 / N - 1.0 / (static_cast<double>(N) * N));
  return var / (t * t);
}

std::vector<TailCheck> chebyshev_tail_check(const TStatistics& stats, std::span<const double> thresholds) {
  std::vector<TailCheck> out;
  for (double t : thresholds) {
    TailCheck c;
    c.t = t;
    c.bound = chebyshev_bound(stats.k, stats.N, t);
    std::uint64_t hits = 0;
    for (std::size_t x = 0; x < stats.histogram.size(); ++x) {
      if (static_cast<double>(x) >= stats.mean + t) hits += stats.histogram[x];
    }
    c.tail = static_cast<double>(hits) / static_cast<double>(stats.population);
    c.pass = c.tail <= c.bound;
    out.push_back(c);
  }
  return out;
}

CovarianceReport covariance_check(std::uint32_t k, std::uint32_t N, const BitVector& b, std::size_t pair_count,
                                  Rng& rng) {
  if (b.k != k) throw InvalidArgument("covariance_check: b must have k bits");
  check_exhaustive_budget(k, N);
  const std::uint32_t masks = 1u << k;
  CovarianceReport report;
  report.k = k;
  report.N = N;
  report.b = b;

  const std::uint64_t others = masks - 1;
  const std::uint64_t total_pairs = others * (others - 1) / 2;
  if (total_pairs <= pair_count) {
    for (std::uint32_t x = 0; x < masks; ++x) {
      for (std::uint32_t y = x + 1; y < masks; ++y) {
        if (x != b.mask && y != b.mask) report.pairs.emplace_back(x, y);
      }
    }
  } else {
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    while (report.pairs.size() < pair_count) {
      auto x = static_cast<std::uint32_t>(rng.uniform_below(masks));
      auto y = static_cast<std::uint32_t>(rng.uniform_below(masks));
      if (x == b.mask || y == b.mask || x == y) continue;
      if (x > y) std::swap(x, y);
      if (seen.insert({x, y}).second) report.pairs.emplace_back(x, y);
    }
  }

  std::vector<std::uint64_t> single(masks, 0);
  std::vector<std::uint64_t> joint(report.pairs.size(), 0);
  const auto population = static_cast<std::uint64_t>(std::llround(std::pow(double(N), double(k))));
  std::vector<std::uint32_t> l(k, 0), sums;
  for (std::uint64_t v = 0; v < population; ++v) {
    all_subset_sums(l, N, sums);
    const std::uint32_t target = sums[b.mask];
    for (std::uint32_t x = 0; x < masks; ++x) single[x] += sums[x] == target ? 1 : 0;
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
      joint[i] += (sums[report.pairs[i].first] == target && sums[report.pairs[i].second] == target) ? 1 : 0;
    }
    increment(l, N);
  }

  const auto n = static_cast<__int128>(population);
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const __int128 cx = single[report.pairs[i].first];
    const __int128 cy = single[report.pairs[i].second];
    const double cov = exact_ratio(n * static_cast<__int128>(joint[i]) - cx * cy, n * n);
    report.max_abs_covariance = std::max(report.max_abs_covariance, std::abs(cov));
  }
  for (std::uint32_t x = 0; x < masks; ++x) {
    if (x == b.mask) continue;
    const __int128 num = static_cast<__int128>(N) * single[x] - n;
    const double dev = std::abs(exact_ratio(num, n * N));
    report.max_marginal_deviation = std::max(report.max_marginal_deviation, dev);
  }
  return report;
}

DcspConfusion dcsp_confusion(const DcspParams& dcsp, std::uint64_t trials, std::uint64_t seed,
                             std::uint64_t coset_samples, double tolerance, double sigma, unsigned threads) {
  if (trials < 1) throw InvalidArgument("dcsp_confusion: trials must be >= 1");
  const DihedralParams& params = dcsp.params;
  const LabeledBasis b0 = enumerate_basis(params, BasisPart::b0);
  DcspConfusion out{dcsp};
  out.b0_size = b0.size();
  out.bound = dcsp.uniform_input_bound();
  out.exact_uniform = static_cast<double>(b0.size()) / static_cast<double>(params.full_dim());
  out.bound_pass = out.exact_uniform <= out.bound;

  const std::uint64_t coset_total = params.int_dim() * params.N();
  const std::uint64_t count = coset_samples == 0 ? coset_total : coset_samples;
  std::vector<double> coset_probability(count);
  parallel_for(count, threads, [&](std::uint64_t i) {
    CosetStateSpec spec;
    if (coset_samples == 0) {
      spec.d = static_cast<std::uint32_t>(i / params.int_dim());
      spec.xs = unpack_ints(i % params.int_dim(), params.N(), params.k());
    } else {
      Rng rng(derive_seed(seed, kStreamDcspCoset, i));
      spec.d = static_cast<std::uint32_t>(rng.uniform_below(params.N()));
      for (std::uint32_t r = 0; r < params.k(); ++r) {
        spec.xs.push_back(static_cast<std::uint32_t>(rng.uniform_below(params.N())));
      }
    }
    coset_probability[i] = coset_space_probability(build_coset_state(spec, params), b0);
  });
  out.coset_states = count;
  out.min_coset_probability = kInf;
  double max_dev = 0.0;
  for (double p : coset_probability) {
    out.min_coset_probability = std::min(out.min_coset_probability, p);
    max_dev = std::max(max_dev, std::abs(p - 1.0));
  }
  out.coset_pass = max_dev <= tolerance;

  std::vector<std::uint8_t> verdicts(trials);
  parallel_for(trials, threads, [&](std::uint64_t i) {
    Rng rng(derive_seed(seed, kStreamDcspUniform, i));
    const std::uint64_t index = rng.uniform_below(params.full_dim());
    verdicts[i] = dcsp_measure(DenseState::basis(params, index), b0, rng).verdict == DcspVerdict::in_c;
  });
  out.trials = trials;
  out.in_c = static_cast<std::uint64_t>(std::count(verdicts.begin(), verdicts.end(), 1));
  const auto n = static_cast<double>(trials);
  out.empirical_uniform = static_cast<double>(out.in_c) / n;
  out.standard_error = std::sqrt(out.empirical_uniform * (1.0 - out.empirical_uniform) / n);
  out.null_sigma = std::sqrt(out.exact_uniform * (1.0 - out.exact_uniform) / n);
  out.sampled_pass = std::abs(out.empirical_uniform - out.exact_uniform) <= sigma * out.null_sigma;
  return out;
}

DcpDemo dcp_demo(std::uint32_t N, std::uint32_t kprime, std::uint32_t repeats, std::uint32_t runs,
                 std::uint64_t seed, double threshold, unsigned threads) {
  if (runs < 1) throw InvalidArgument("dcp_demo: runs must be >= 1");
  if (!std::has_single_bit(N)) throw InvalidArgument("dcp_demo: N must be a power of 2");
  const DcspParams dcsp = DcspParams::make(N, kprime);
  const LabeledBasis b0 = enumerate_basis(dcsp.params, BasisPart::b0);
  const auto bits = static_cast<std::uint64_t>(std::countr_zero(N));
  const std::uint64_t budget = dcsp.params.k() * bits * (repeats + 1);

  DcpDemo demo;
  demo.N = N;
  demo.kprime = kprime;
  demo.repeats = repeats;
  demo.threshold = threshold;
  demo.runs.resize(runs);
  parallel_for(runs, threads, [&](std::uint64_t i) {
    Rng setup(derive_seed(seed, kStreamDcp, i));
    DcpRun& run = demo.runs[i];
    run.d = static_cast<std::uint32_t>(setup.uniform_below(N));
    CosetStateOracle oracle(N, run.d, setup.next(), budget);
    Rng measure(setup.next());
    const DcpResult result = dcp_solve(oracle, dcsp, repeats, measure, &b0);
    run.recovered = result.recovered;
    run.states_consumed = result.states_consumed;
    run.bits = result.bits;
  });
  for (const DcpRun& run : demo.runs) demo.recovered += run.recovered == run.d ? 1 : 0;
  demo.rate = static_cast<double>(demo.recovered) / runs;
  demo.pass = demo.rate >= threshold;
  return demo;
}

ModeEquivalence mode_equivalence(const DihedralParams& params, double tolerance) {
  auto basis = std::make_shared<const LabeledBasis>(enumerate_basis(params));
  const BasisChangeUnitary us = build_US(basis, AssignmentStrategy::canonical);
  const IndicatorUnitary uc = build_UC(basis);
  const Eigen::MatrixXcd us_dense = materialize_dense(us);
  const Eigen::MatrixXcd uc_dense = materialize_dense(uc);

  ModeEquivalence out;
  out.us_unitarity = unitarity_deviation(us_dense);
  out.uc_unitarity = unitarity_deviation(uc_dense);
  for (std::uint64_t packed = 0; packed < params.int_dim(); ++packed) {
    const std::vector<std::uint32_t> l = unpack_ints(packed, params.N(), params.k());
    for (std::uint32_t mask = 0; mask < params.block_dim(); ++mask) {
      const BitVector b{mask, params.k()};
      out.max_tv_alg1 = std::max(out.max_tv_alg1, total_variation(exact_outcome_distribution(l, b, us),
                                                                  dense_algorithm1_distribution(l, b, us_dense, params)));
      out.max_tv_alg2 = std::max(out.max_tv_alg2, total_variation(exact_outcome_distribution(l, b, uc),
                                                                  dense_algorithm2_distribution(l, b, uc_dense, params)));
      ++out.inputs;
    }
  }
  out.pass = out.max_tv_alg1 <= tolerance && out.max_tv_alg2 <= tolerance && out.us_unitarity <= tolerance &&
             out.uc_unitarity <= tolerance;
  return out;
}

}  // namespace dcl
