#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dcl/experiments.hpp"

namespace dcl::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

struct Check {
  std::string name;
  std::string comparison;  // "abs_diff", "at_most", "at_least", "sigma", "equal"
  Json predicted;
  Json observed;
  double tolerance = 0.0;
  bool pass = false;
  Json details = Json::object();

  Json to_json() const;
};

/// |observed - predicted| <= tolerance.
Check abs_diff(std::string name, double predicted, double observed, double tolerance);
/// observed <= limit.
Check at_most(std::string name, double limit, double observed);
/// observed >= limit - slack.
Check at_least(std::string name, double limit, double observed, double slack = 0.0);
/// |observed - predicted| <= sigmas * sigma.
Check within_sigma(std::string name, double predicted, double observed, double sigma, double sigmas);
/// Exact integer match.
Check equal(std::string name, std::int64_t predicted, std::int64_t observed);

/// One run of one subcommand: {version, tool_version, command, config, seed,
/// checks[], summary, timing}. Everything except `timing` is a deterministic
/// function of the command line.
class Report {
 public:
  Report(std::string command, Json config, std::uint64_t seed);

  void add(Check check);

  template <typename Fn>
  void timed(const std::string& section, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    timing_.emplace_back(section,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  const std::vector<Check>& checks() const noexcept { return checks_; }
  bool pass() const;
  Json to_json() const;

 private:
  std::string command_;
  Json config_;
  std::uint64_t seed_;
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, double>> timing_;
};

// Check builders for each experiment. `prefix` namespaces the check names.
void add_basis_checks(Report& report, const DihedralParams& params, const std::string& prefix);
void add_collision_checks(Report& report, const ExperimentSummary& summary, const std::string& prefix);
void add_instance_checks(Report& report, const std::vector<InstanceCheck>& checks, const std::string& prefix);
void add_exact_cell_checks(Report& report, const std::vector<ExactCell>& cells, double tolerance,
                           const std::string& prefix);
void add_tilde_checks(Report& report, const TildeSweep& sweep, double tolerance, const std::string& prefix);
void add_tstat_checks(Report& report, const TStatistics& stats, const std::string& prefix, double sigma = 3.0);
void add_covariance_checks(Report& report, const CovarianceReport& cov, const std::string& prefix);
void add_tail_checks(Report& report, const std::vector<TailCheck>& tails, const std::string& prefix);
void add_dcsp_checks(Report& report, const DcspConfusion& confusion, double tolerance, double sigma,
                     const std::string& prefix);
void add_dcp_checks(Report& report, const DcpDemo& demo, const std::string& prefix);
void add_mode_checks(Report& report, const ModeEquivalence& modes, double tolerance, const std::string& prefix);

/// The full acceptance suite at its fixed sizes.
void run_full_suite(Report& report, std::uint64_t seed, unsigned threads);

Json histogram_json(const TStatistics& stats);
std::string histogram_csv(const TStatistics& stats);

}  // namespace dcl::report
