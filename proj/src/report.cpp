#include "dcl/report.hpp"

#include <cmath>
#include <sstream>

namespace dcl::report {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

Check make(std::string name, std::string comparison, Json predicted, Json observed, double tolerance, bool pass,
           Json details = Json::object()) {
  return Check{std::move(name), std::move(comparison), std::move(predicted), std::move(observed),
               tolerance,       pass,                  std::move(details)};
}

std::string cell_name(const std::string& prefix, std::size_t t) { return prefix + "T=" + std::to_string(t); }

}  // namespace

Json Check::to_json() const {
  Json j;
  j["name"] = name;
  j["comparison"] = comparison;
  j["predicted"] = predicted;
  j["observed"] = observed;
  j["tolerance"] = tolerance;
  j["verdict"] = pass ? "pass" : "fail";
  if (!details.empty()) j["details"] = details;
  return j;
}

Check abs_diff(std::string name, double predicted, double observed, double tolerance) {
  return make(std::move(name), "abs_diff", predicted, observed, tolerance,
              std::abs(observed - predicted) <= tolerance);
}

Check at_most(std::string name, double limit, double observed) {
  return make(std::move(name), "at_most", limit, observed, 0.0, observed <= limit);
}

Check at_least(std::string name, double limit, double observed, double slack) {
  return make(std::move(name), "at_least", limit, observed, slack, observed >= limit - slack);
}

Check within_sigma(std::string name, double predicted, double observed, double sigma, double sigmas) {
  Check c = make(std::move(name), "sigma", predicted, observed, sigmas * sigma,
                 std::abs(observed - predicted) <= sigmas * sigma);
  c.details["sigma"] = sigma;
  c.details["sigmas"] = sigmas;
  return c;
}

Check equal(std::string name, std::int64_t predicted, std::int64_t observed) {
  return make(std::move(name), "equal", predicted, observed, 0.0, predicted == observed);
}

Report::Report(std::string command, Json config, std::uint64_t seed)
    : command_(std::move(command)), config_(std::move(config)), seed_(seed) {}

void Report::add(Check check) {
  for (const Check& c : checks_) {
    if (c.name == check.name) throw std::logic_error("duplicate check name: " + check.name);
  }
  checks_.push_back(std::move(check));
}

bool Report::pass() const {
  for (const Check& c : checks_) {
    if (!c.pass) return false;
  }
  return true;
}

Json Report::to_json() const {
  Json j;
  j["version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["command"] = command_;
  j["config"] = config_;
  j["seed"] = seed_;
  Json checks = Json::array();
  std::size_t passed = 0;
  for (const Check& c : checks_) {
    checks.push_back(c.to_json());
    passed += c.pass ? 1 : 0;
  }
  j["checks"] = std::move(checks);
  j["summary"] = {{"checks", checks_.size()},
                  {"passed", passed},
                  {"failed", checks_.size() - passed},
                  {"verdict", pass() ? "pass" : "fail"}};
  Json timing;
  double total = 0.0;
  Json sections = Json::object();
  for (const auto& [name, seconds] : timing_) {
    sections[name] = seconds;
    total += seconds;
  }
  timing["total_seconds"] = total;
  timing["sections"] = std::move(sections);
  j["timing"] = std::move(timing);
  return j;
}

void add_basis_checks(Report& report, const DihedralParams& params, const std::string& prefix) {
  const LabeledBasis basis = enumerate_basis(params);
  report.add(equal(prefix + "basis_size", static_cast<std::int64_t>(params.full_dim()),
                   static_cast<std::int64_t>(basis.size())));
  const GramReport gram =
      params.full_dim() <= kDenseColumnBudget ? gram_check_dense(basis) : gram_check_sparse(basis);
  Check g = at_most(prefix + "gram_max_deviation", 1e-10, gram.max_deviation);
  g.details["method"] = params.full_dim() <= kDenseColumnBudget ? "dense" : "sparse";
  report.add(std::move(g));

  const OrthogonalityReport orth = verify_coset_orthogonality(basis);
  Check o = at_most(prefix + "perp_coset_max_inner", 1e-10, orth.max_abs_inner);
  o.details = {{"coset_states", orth.coset_states},
               {"perp_vectors", orth.perp_vectors},
               {"b0_coset_max_inner", orth.max_abs_inner_b0}};
  report.add(std::move(o));

  const SpanReport span = coset_span_check(params);
  Check r = equal(prefix + "coset_rank", static_cast<std::int64_t>(span.b0_size),
                  static_cast<std::int64_t>(span.rank));
  r.details = {{"coset_states", span.coset_states}, {"rank_tolerance", span.rank_tolerance}};
  report.add(std::move(r));
  report.add(at_most(prefix + "coset_residual", 1e-10, span.max_coset_residual));
  report.add(at_most(prefix + "b0_residual", 1e-10, span.max_b0_residual));
  report.add(at_most(prefix + "perp_projection_on_b0", 1e-10, span.max_perp_projection));
}

void add_collision_checks(Report& report, const ExperimentSummary& summary, const std::string& prefix) {
  const ExperimentConfig& config = summary.config;
  for (const SuccessCell& cell : summary.cells) {
    const std::string base = cell_name(prefix, cell.solution_count);
    const bool equality = cell.prediction.kind == PredictionKind::equality;
    Json details = {{"trials", cell.trials},
                    {"min_exact", cell.min_exact},
                    {"max_exact", cell.max_exact},
                    {"max_deviation", cell.max_exact_deviation}};
    if (cell.one_branch_estimate) {
      details["one_branch_estimate"] = *cell.one_branch_estimate;
      details["one_branch_discrepancy"] =
          std::abs(cell.mean_exact - *cell.one_branch_estimate) > config.exact_tolerance;
    }
    report.add(make(base + "/exact", equality ? "abs_diff" : "at_least", cell.prediction.value,
                    equality ? cell.mean_exact : cell.min_exact, config.exact_tolerance, cell.exact_pass,
                    std::move(details)));
    Json sampled = {{"successes", cell.successes},
                    {"trials", cell.trials},
                    {"standard_error", cell.standard_error},
                    {"null_sigma", cell.null_sigma},
                    {"sigmas", config.sigma}};
    if (equality) {
      report.add(make(base + "/sampled", "sigma", cell.mean_exact, cell.empirical,
                      config.sigma * cell.null_sigma, cell.sampled_pass, std::move(sampled)));
    } else {
      report.add(make(base + "/sampled", "at_least", cell.prediction.value, cell.empirical,
                      config.sigma * cell.null_sigma, cell.sampled_pass, std::move(sampled)));
    }
  }
}

void add_instance_checks(Report& report, const std::vector<InstanceCheck>& checks, const std::string& prefix) {
  double max_dev = 0.0;
  std::size_t exact_ok = 0, sampled_ok = 0;
  Json rows = Json::array();
  for (const InstanceCheck& c : checks) {
    max_dev = std::max(max_dev, std::abs(c.exact - c.prediction.value));
    exact_ok += c.exact_pass ? 1 : 0;
    sampled_ok += c.sampled_pass ? 1 : 0;
    rows.push_back({{"l", c.l},
                    {"b", c.b.to_string()},
                    {"solution_count", c.solution_count},
                    {"exact", c.exact},
                    {"empirical", c.empirical},
                    {"sigma", c.sigma},
                    {"pass", c.exact_pass && c.sampled_pass}});
  }
  Check e = make(prefix + "exact_max_deviation", "at_most", 1e-12, max_dev, 0.0, exact_ok == checks.size(),
                 {{"instances", checks.size()}, {"passing", exact_ok}});
  report.add(std::move(e));
  report.add(make(prefix + "sampled_within_3sigma", "equal", checks.size(), sampled_ok, 0.0,
                  sampled_ok == checks.size(),
                  {{"samples_per_instance", checks.empty() ? 0 : checks.front().samples}, {"instances", rows}}));
}

void add_exact_cell_checks(Report& report, const std::vector<ExactCell>& cells, double tolerance,
                           const std::string& prefix) {
  for (const ExactCell& cell : cells) {
    const bool equality = cell.prediction.kind == PredictionKind::equality;
    Json details = {{"inputs", cell.inputs},
                    {"min_exact", cell.min_exact},
                    {"max_exact", cell.max_exact},
                    {"max_deviation", cell.max_deviation}};
    if (cell.one_branch_estimate) {
      details["one_branch_estimate"] = *cell.one_branch_estimate;
      details["one_branch_discrepancy"] = std::abs(cell.max_exact - *cell.one_branch_estimate) > tolerance;
    }
    report.add(make(cell_name(prefix, cell.solution_count), equality ? "abs_diff" : "at_least",
                    cell.prediction.value, equality ? cell.max_exact : cell.min_exact, tolerance, cell.pass,
                    std::move(details)));
  }
}

void add_tilde_checks(Report& report, const TildeSweep& sweep, double tolerance, const std::string& prefix) {
  for (const ExactCell& cell : sweep.cells) {
    report.add(make(cell_name(prefix, cell.solution_count), "at_least", cell.prediction.value, cell.min_exact,
                    tolerance, cell.pass,
                    {{"rotations", sweep.rotations}, {"inputs", cell.inputs}, {"max_exact", cell.max_exact}}));
  }
}

void add_tstat_checks(Report& report, const TStatistics& stats, const std::string& prefix, double sigma) {
  Json details = {{"b", stats.b.to_string()},
                  {"mode", to_string(stats.mode)},
                  {"population", stats.population},
                  {"max", stats.max}};
  if (stats.mode == TStatMode::exhaustive) {
    Check m = abs_diff(prefix + "mean", stats.expected_mean, stats.mean, 1e-9);
    m.details = details;
    report.add(std::move(m));
    report.add(abs_diff(prefix + "variance", stats.expected_variance, stats.variance, 1e-9));
  } else {
    const double se = std::sqrt(stats.expected_variance / static_cast<double>(stats.population));
    Check m = within_sigma(prefix + "mean", stats.expected_mean, stats.mean, se, sigma);
    m.details.update(details);
    m.details["variance"] = stats.variance;
    report.add(std::move(m));
  }
}

void add_covariance_checks(Report& report, const CovarianceReport& cov, const std::string& prefix) {
  Check c = at_most(prefix + "max_abs_covariance", 1e-9, cov.max_abs_covariance);
  c.details = {{"pairs", cov.pairs.size()}, {"b", cov.b.to_string()}};
  report.add(std::move(c));
  report.add(at_most(prefix + "marginal_deviation", 1e-9, cov.max_marginal_deviation));
}

void add_tail_checks(Report& report, const std::vector<TailCheck>& tails, const std::string& prefix) {
  for (const TailCheck& t : tails) report.add(at_most(prefix + "tail_t=" + num(t.t), t.bound, t.tail));
}

void add_dcsp_checks(Report& report, const DcspConfusion& confusion, double tolerance, double sigma,
                     const std::string& prefix) {
  report.add(make(prefix + "coset_in_c_probability", "abs_diff", 1.0, confusion.min_coset_probability, tolerance,
                  confusion.coset_pass, {{"coset_states", confusion.coset_states}}));
  report.add(make(prefix + "uniform_exact_vs_bound", "at_most", confusion.bound, confusion.exact_uniform, 0.0,
                  confusion.bound_pass,
                  {{"b0_size", confusion.b0_size},
                   {"dimension", confusion.dcsp.params.full_dim()},
                   {"k", confusion.dcsp.params.k()},
                   {"kprime", confusion.dcsp.kprime}}));
  report.add(make(prefix + "uniform_sampled", "sigma", confusion.exact_uniform, confusion.empirical_uniform,
                  sigma * confusion.null_sigma, confusion.sampled_pass,
                  {{"trials", confusion.trials},
                   {"in_c", confusion.in_c},
                   {"standard_error", confusion.standard_error},
                   {"null_sigma", confusion.null_sigma}}));
}

void add_dcp_checks(Report& report, const DcpDemo& demo, const std::string& prefix) {
  Json runs = Json::array();
  for (const DcpRun& r : demo.runs) {
    Json bits = Json::array();
    for (const DcpBitTrace& b : r.bits) {
      bits.push_back({{"bit", b.bit}, {"votes_in_c", b.votes_in_c}, {"votes_perp", b.votes_perp}});
    }
    runs.push_back({{"d", r.d}, {"recovered", r.recovered}, {"states", r.states_consumed}, {"bits", bits}});
  }
  report.add(make(prefix + "recovery_rate", "at_least", demo.threshold, demo.rate, 0.0, demo.pass,
                  {{"N", demo.N},
                   {"kprime", demo.kprime},
                   {"repeats", demo.repeats},
                   {"recovered", demo.recovered},
                   {"runs", runs}}));
}

void add_mode_checks(Report& report, const ModeEquivalence& modes, double tolerance, const std::string& prefix) {
  report.add(at_most(prefix + "alg1_total_variation", tolerance, modes.max_tv_alg1));
  report.add(at_most(prefix + "alg2_total_variation", tolerance, modes.max_tv_alg2));
  report.add(at_most(prefix + "us_unitarity", tolerance, modes.us_unitarity));
  report.add(at_most(prefix + "uc_unitarity", tolerance, modes.uc_unitarity));
}

void run_full_suite(Report& report, std::uint64_t seed, unsigned threads) {
  report.timed("basis", [&] {
    add_basis_checks(report, DihedralParams(3, 2), "basis/N=3,k=2/");
    add_basis_checks(report, DihedralParams(2, 1), "basis/N=2,k=1/");
  });

  ExperimentConfig config;
  config.N = 4;
  config.k = 4;
  config.seed = seed;
  config.threads = threads;

  report.timed("alg1_canonical_instances", [&] {
    config.algorithm = Algorithm::alg1;
    config.family = UnitaryFamily::canonical;
    add_instance_checks(report, instance_sampling_check(config, 50, 2000), "alg1_canonical/instances/");
  });
  report.timed("alg1_canonical_cells", [&] {
    config.trials = 10000;
    add_collision_checks(report, collision_success_experiment(config), "alg1_canonical/cells/");
  });
  report.timed("alg1_hat", [&] {
    const CollisionSetup setup(DihedralParams(4, 4), Algorithm::alg1, UnitaryFamily::hat, 0, 0);
    add_exact_cell_checks(report, exhaustive_exact_check(setup, 1e-12), 1e-12, "alg1_hat/exhaustive/");
    config.family = UnitaryFamily::hat;
    add_collision_checks(report, collision_success_experiment(config), "alg1_hat/cells/");
  });
  report.timed("alg2_canonical", [&] {
    config.algorithm = Algorithm::alg2;
    config.family = UnitaryFamily::canonical;
    add_collision_checks(report, collision_success_experiment(config), "alg2_canonical/cells/");
  });
  report.timed("tilde", [&] {
    for (Algorithm alg : {Algorithm::alg1, Algorithm::alg2}) {
      const TildeSweep sweep = tilde_bound_sweep(DihedralParams(4, 4), alg, 100, seed, 1e-12, threads);
      add_tilde_checks(report, sweep, 1e-12, "tilde_" + to_string(alg) + "/");
    }
  });
  report.timed("t_statistics", [&] {
    const double thresholds[] = {1, 2, 5, 10};
    std::uint64_t index = 0;
    for (std::uint32_t k = 2; k <= 5; ++k) {
      for (std::uint32_t n : {2u, 4u, 8u, 16u}) {
        const BitVector b{(1u << k) - 1, k};
        const std::string prefix = "t_stats/k=" + std::to_string(k) + ",N=" + std::to_string(n) + "/";
        const TStatistics stats = t_statistics(k, n, b, TStatMode::exhaustive, nullptr, 0, threads);
        add_tstat_checks(report, stats, prefix);
        Rng rng(derive_seed(seed, 100, index++));
        add_covariance_checks(report, covariance_check(k, n, b, 20, rng), prefix);
        add_tail_checks(report, chebyshev_tail_check(stats, thresholds), prefix);
      }
    }
  });
  report.timed("dcsp", [&] {
    add_dcsp_checks(report, dcsp_confusion(DcspParams::make(4, 1), 2000, seed, 0, 1e-10, 3.0, threads), 1e-10,
                    3.0, "dcsp/N=4,kprime=1/");
  });
  report.timed("dcp", [&] { add_dcp_checks(report, dcp_demo(4, 1, 5, 20, seed, 0.9, threads), "dcp/N=4,kprime=1/"); });
  report.timed("modes", [&] { add_mode_checks(report, mode_equivalence(DihedralParams(2, 2)), 1e-10, "modes/N=2,k=2/"); });
}

Json histogram_json(const TStatistics& stats) {
  Json h = Json::array();
  for (std::size_t x = 0; x < stats.histogram.size(); ++x) h.push_back({{"x", x}, {"count", stats.histogram[x]}});
  return h;
}

std::string histogram_csv(const TStatistics& stats) {
  std::ostringstream os;
  os << "t_minus_1,count\n";
  for (std::size_t x = 0; x < stats.histogram.size(); ++x) os << x << ',' << stats.histogram[x] << '\n';
  return os.str();
}

}  // namespace dcl::report
