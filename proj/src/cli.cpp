#include "dcl/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <string>

#include "dcl/report.hpp"

namespace dcl::cli {
namespace {

using report::Json;
using report::Report;

struct Common {
  std::uint64_t seed = 7;
  unsigned threads = 0;
  std::string out;
};

struct BasisOptions {
  std::uint32_t N = 3;
  std::uint32_t k = 2;
  std::string export_path;
};

struct CollisionOptions {
  std::uint32_t N = 4;
  std::uint32_t k = 4;
  double c = 1.0;
  std::uint64_t trials = 10000;
  std::string unitary = "canonical";
  std::uint64_t rotation_seed = 1;
  double sigma = 3.0;
};

struct DcspOptions {
  std::uint32_t N = 4;
  std::uint32_t kprime = 1;
  std::uint64_t trials = 2000;
  std::uint64_t coset_samples = 0;
  double sigma = 3.0;
};

struct DcpOptions {
  std::uint32_t N = 4;
  std::uint32_t kprime = 1;
  std::uint32_t repeats = 5;
  std::uint32_t runs = 20;
  double threshold = 0.9;
};

struct TStatOptions {
  std::uint32_t N = 4;
  std::uint32_t k = 3;
  std::string mode = "exhaustive";
  std::uint64_t samples = 10000;
  std::string b;
  std::size_t pairs = 20;
  std::string csv;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path + " for writing");
  f << text;
  if (!f) throw InvalidArgument("failed writing " + path);
}

Report run_verify_basis(const Common& common, const BasisOptions& o) {
  const DihedralParams params(o.N, o.k);
  // The span check holds every coset state as a dense column.
  if (params.full_dim() * params.int_dim() * params.N() > amplitude_budget()) {
    throw ResourceLimit("verify-basis: coset-state matrix exceeds the amplitude budget");
  }
  Report r("verify-basis", Json{{"N", o.N}, {"k", o.k}, {"export_basis", o.export_path}}, common.seed);
  r.timed("verify", [&] { report::add_basis_checks(r, params, ""); });
  if (!o.export_path.empty()) write_text(o.export_path, basis_to_json(enumerate_basis(params)).dump(2) + "\n");
  return r;
}

Report run_collision(const Common& common, const CollisionOptions& o, Algorithm algorithm) {
  ExperimentConfig config;
  config.N = o.N;
  config.k = o.k;
  config.c = o.c;
  config.trials = o.trials;
  config.seed = common.seed;
  config.algorithm = algorithm;
  config.family = parse_family(o.unitary);
  config.rotation_seed = o.rotation_seed;
  config.sigma = o.sigma;
  config.threads = common.threads;
  config.validate();
  Json cfg = {{"N", o.N},           {"k", config.registers()},
              {"c", o.c},           {"trials", o.trials},
              {"unitary", o.unitary}, {"rotation_seed", o.rotation_seed},
              {"sigma", o.sigma},   {"threads", common.threads}};
  if (config.family == UnitaryFamily::hat) cfg["input"] = "first solution of the drawn block";
  Report r(to_string(algorithm), std::move(cfg), common.seed);
  r.timed("experiment", [&] {
    const ExperimentSummary s = collision_success_experiment(config);
    report::add_collision_checks(r, s, "");
  });
  return r;
}

Report run_dcsp(const Common& common, const DcspOptions& o) {
  const DcspParams dcsp = DcspParams::make(o.N, o.kprime);
  Report r("dcsp",
           Json{{"N", o.N},
                {"kprime", o.kprime},
                {"k", dcsp.params.k()},
                {"trials", o.trials},
                {"coset_samples", o.coset_samples},
                {"sigma", o.sigma},
                {"threads", common.threads}},
           common.seed);
  r.timed("confusion", [&] {
    report::add_dcsp_checks(
        r, dcsp_confusion(dcsp, o.trials, common.seed, o.coset_samples, 1e-10, o.sigma, common.threads), 1e-10,
        o.sigma, "");
  });
  return r;
}

Report run_dcp(const Common& common, const DcpOptions& o) {
  Report r("dcp-demo",
           Json{{"N", o.N},
                {"kprime", o.kprime},
                {"repeats", o.repeats},
                {"runs", o.runs},
                {"threshold", o.threshold},
                {"threads", common.threads}},
           common.seed);
  r.timed("demo", [&] {
    report::add_dcp_checks(r, dcp_demo(o.N, o.kprime, o.repeats, o.runs, common.seed, o.threshold, common.threads),
                           "");
  });
  return r;
}

Report run_tstats(const Common& common, const TStatOptions& o) {
  if (o.mode != "exhaustive" && o.mode != "sampled") throw InvalidArgument("--mode must be exhaustive or sampled");
  if (o.k < 1 || o.k > kMaxEnumerationRegisters) throw InvalidArgument("--k out of range");
  const BitVector b = o.b.empty() ? BitVector{(1u << o.k) - 1, o.k} : BitVector::parse(o.b);
  if (b.k != o.k) throw InvalidArgument("--b must have k bits");
  const TStatMode mode = o.mode == "exhaustive" ? TStatMode::exhaustive : TStatMode::sampled;
  Report r("t-stats",
           Json{{"N", o.N},
                {"k", o.k},
                {"mode", o.mode},
                {"samples", mode == TStatMode::sampled ? o.samples : 0},
                {"b", b.to_string()},
                {"pairs", o.pairs},
                {"threads", common.threads}},
           common.seed);
  r.timed("statistics", [&] {
    Rng rng(derive_seed(common.seed, 200, 0));
    const TStatistics stats = t_statistics(o.k, o.N, b, mode, &rng, o.samples, common.threads);
    report::add_tstat_checks(r, stats, "");
    const double thresholds[] = {1, 2, 5, 10};
    report::add_tail_checks(r, chebyshev_tail_check(stats, thresholds), "");
    if (mode == TStatMode::exhaustive && o.k >= 2) {
      Rng pairs(derive_seed(common.seed, 201, 0));
      report::add_covariance_checks(r, covariance_check(o.k, o.N, b, o.pairs, pairs), "");
    }
    if (!o.csv.empty()) write_text(o.csv, report::histogram_csv(stats));
  });
  return r;
}

Report run_report_all(const Common& common) {
  Report r("report-all", Json{{"threads", common.threads}}, common.seed);
  report::run_full_suite(r, common.seed, common.threads);
  return r;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator and verification lab for the dihedral coset space problem", "dcl"};
  app.set_version_flag("--version", report::kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--seed", common.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
  app.add_option("--out", common.out, "Write the JSON report here instead of standard output");

  BasisOptions basis;
  auto* verify = app.add_subcommand("verify-basis", "Orthonormality, coset orthogonality and span checks");
  verify->add_option("--N", basis.N, "Modulus N")->capture_default_str();
  verify->add_option("--k", basis.k, "Register count k")->capture_default_str();
  verify->add_option("--export-basis", basis.export_path, "Also write the labeled basis as JSON to this path");

  CollisionOptions coll1, coll2;
  auto add_collision = [&](const char* name, const char* help, CollisionOptions& o) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--N", o.N, "Modulus N")->capture_default_str();
    sub->add_option("--k", o.k, "Register count k (0 = ceil(log2 N + c log2 log2 N))")->capture_default_str();
    sub->add_option("--c", o.c, "Constant c used when --k is 0")->capture_default_str();
    sub->add_option("--trials", o.trials, "Random instances, one run each")->capture_default_str();
    sub->add_option("--unitary", o.unitary, "canonical | random | hat | tilde")
        ->capture_default_str()
        ->check(CLI::IsMember({"canonical", "random", "hat", "tilde"}));
    sub->add_option("--rotation-seed", o.rotation_seed, "Seed of the tilde-basis rotations")->capture_default_str();
    sub->add_option("--sigma", o.sigma, "Sampling acceptance in standard deviations")->capture_default_str();
    return sub;
  };
  auto* alg1 = add_collision("alg1", "Collision experiment with the basis-change unitary", coll1);
  auto* alg2 = add_collision("alg2", "Collision experiment with the indicator unitary", coll2);

  DcspOptions dopt;
  auto* dcsp = app.add_subcommand("dcsp", "Coset-space measurement confusion matrix");
  dcsp->add_option("--N", dopt.N, "Modulus N")->capture_default_str();
  dcsp->add_option("--kprime", dopt.kprime, "Slack k' (k = ceil(log2 2N) + k')")->capture_default_str();
  dcsp->add_option("--trials", dopt.trials, "Uniform standard-basis trials")->capture_default_str();
  dcsp->add_option("--coset-samples", dopt.coset_samples, "Random coset states to check (0 = all)")
      ->capture_default_str();
  dcsp->add_option("--sigma", dopt.sigma, "Sampling acceptance in standard deviations")->capture_default_str();

  DcpOptions popt;
  auto* dcp = app.add_subcommand("dcp-demo", "Recover hidden shifts bit by bit through coset-space measurements");
  dcp->add_option("--N", popt.N, "Modulus N (power of 2)")->capture_default_str();
  dcp->add_option("--kprime", popt.kprime, "Slack k'")->capture_default_str();
  dcp->add_option("--repeats", popt.repeats, "Measurements per bit (majority vote)")->capture_default_str();
  dcp->add_option("--runs", popt.runs, "Independent hidden shifts")->capture_default_str();
  dcp->add_option("--threshold", popt.threshold, "Required recovery rate")->capture_default_str();

  TStatOptions topt;
  auto* tstats = app.add_subcommand("t-stats", "Distribution of the number of subset-sum collisions over l");
  tstats->add_option("--N", topt.N, "Modulus N")->capture_default_str();
  tstats->add_option("--k", topt.k, "Register count k")->capture_default_str();
  tstats->add_option("--mode", topt.mode, "exhaustive | sampled")
      ->capture_default_str()
      ->check(CLI::IsMember({"exhaustive", "sampled"}));
  tstats->add_option("--samples", topt.samples, "Draws of l in sampled mode")->capture_default_str();
  tstats->add_option("--b", topt.b, "Fixed bit-vector, e.g. 101 (default: all ones)");
  tstats->add_option("--pairs", topt.pairs, "Pairs for the covariance check")->capture_default_str();
  tstats->add_option("--csv", topt.csv, "Write the histogram as CSV to this path");

  auto* all = app.add_subcommand("report-all", "Run the full acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    std::optional<Report> result;
    if (verify->parsed()) result = run_verify_basis(common, basis);
    else if (alg1->parsed()) result = run_collision(common, coll1, Algorithm::alg1);
    else if (alg2->parsed()) result = run_collision(common, coll2, Algorithm::alg2);
    else if (dcsp->parsed()) result = run_dcsp(common, dopt);
    else if (dcp->parsed()) result = run_dcp(common, popt);
    else if (tstats->parsed()) result = run_tstats(common, topt);
    else if (all->parsed()) result = run_report_all(common);
    const std::string text = result->to_json().dump(2) + "\n";
    if (common.out.empty()) {
      out << text;
    } else {
      write_text(common.out, text);
    }
    return result->pass() ? 0 : 1;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << "\n";
  } catch (const EmptySolutionSet& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace dcl::cli
