#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lpp/distributions.hpp"
#include "lpp/estimators.hpp"

#include "json.hpp"

namespace lpp {

// ---------------------------------------------------------------------------
// transition sweep

struct SweepConfig {
  std::string dist_spec = "exp:1.0";
  int d = 2;
  std::vector<int> n_list;
  std::vector<double> t_list;      // explicit times, or
  std::vector<double> alpha_list;  // rescaled times t = alpha*Var(T)/n
  std::uint64_t replicates = 1000;
  std::uint64_t pilot_replicates = 1000;
  std::uint64_t seed = 1;
  std::string out_csv;       // empty: do not write
  std::string out_json;      // empty: do not write
  bool timestamp = true;
  ParallelOptions par;
};

struct SweepRow {
  int n = 0, d = 0;
  double t = 0.0, alpha = 0.0;
  double q = 0.0, q_se = 0.0;
  double corr = 0.0, corr_se = 0.0;
  double l2 = 0.0, l2_se = 0.0;
  double overlap = 0.0, overlap_se = 0.0;
  double overlap_fraction = 0.0;
  double var_t = 0.0, var_t_se = 0.0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Pilot Var(T) per n with its own seed, for auditability of alpha.
  struct Pilot {
    int n = 0;
    double var = 0.0, var_se = 0.0;
    std::uint64_t replicates = 0, seed = 0;
  };
  std::vector<Pilot> pilots;
  nlohmann::json summary;
};

SweepResult run_transition_sweep(const SweepConfig& config);

// ---------------------------------------------------------------------------
// variance exponent fit

struct FitPoint {
  double x = 0.0;       // log n
  double y = 0.0;       // log Var(T)
  double y_sigma = 0.0; // propagated from the Var standard error
};

struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};

// Ordinary least squares with per-point error propagation into the slope.
LineFit fit_log_log(const std::vector<FitPoint>& points);

struct ExponentFitResult {
  LineFit fit;
  std::vector<int> n_list;
  std::vector<VarianceEstimate> estimates;
  nlohmann::json summary;
};

// OLS of log Var(T-hat) on log n.  Requires >= 4 sizes spanning a factor 8.
ExponentFitResult fit_variance_exponent(const WeightDistribution& dist, int d,
                                        const std::vector<int>& n_list,
                                        std::uint64_t replicates,
                                        std::uint64_t seed,
                                        const ParallelOptions& par = {});

// ---------------------------------------------------------------------------
// identity suite

struct IdentitySuiteConfig {
  std::string dist_spec = "exp:1.0";
  int d = 2;
  int n = 4;             // covariance/derivative/lemma/monotonicity grids
  int n_stability = 8;
  std::uint64_t replicates = 100000;
  std::uint32_t vertex_sample = 64;
  std::uint64_t seed = 1;
  int time_grid_points = 21;  // covariance-formula grid over [0,1]
  double fd_t = 0.2, fd_h = 0.05;
  std::vector<double> lemma_times = {0.0, 0.3, 1.0};
  std::vector<double> stability_times = {0.05, 0.2, 0.8};
  int monotonicity_points = 11;
  ParallelOptions par;
};

struct IdentitySuiteResult {
  bool all_pass = false;
  nlohmann::json verdicts;
};

IdentitySuiteResult run_identity_suite(const IdentitySuiteConfig& config);

// ---------------------------------------------------------------------------
// distribution audit (moment condition + conditional tails)

struct DistributionAuditRow {
  std::string dist;
  double k = 0.0;
  double cond_mean = 0.0, cond_var = 0.0;  // NaN when the tail is degenerate
  double excess_mean = 0.0;                // b_k = E[X|X>k] - k
  double var_floor = 0.0;
  bool floor_ok = false;
  double moment_value = 0.0;
  bool moment_ok = false;
};

struct DistributionAuditResult {
  std::vector<DistributionAuditRow> rows;
  nlohmann::json summary;  // per-dist verdicts and b_k log-log slopes
};

DistributionAuditResult run_distribution_audit(
    const std::vector<std::string>& dist_specs,
    const std::vector<double>& k_grid, int d);

// ---------------------------------------------------------------------------
// brute-force oracle suite

struct OracleSuiteConfig {
  std::uint64_t configs_per_case = 1000;
  std::uint64_t threshold_configs = 200;
  std::uint64_t seed = 1;
  double continuous_rel_tol = 1e-12;
  double flip_epsilon = 1e-6;
  std::vector<std::string> dist_specs = {"exp:1.0", "geom:0.5", "pareto:3.0",
                                         "unif01"};
};

struct OracleSuiteResult {
  bool pass = false;
  std::uint64_t comparisons = 0;
  std::uint64_t failures = 0;
  double max_rel_error = 0.0;
  std::uint64_t flip_checks = 0;
  std::uint64_t flip_failures = 0;
  nlohmann::json summary;
};

OracleSuiteResult run_oracle_suite(const OracleSuiteConfig& config);

// ---------------------------------------------------------------------------
// helpers

// Uniform grid over [0,1] with exact endpoints.
std::vector<double> linspace01(int points);

std::string format_double(double value);  // 17 significant digits
std::string sweep_csv(const std::vector<SweepRow>& rows, bool timestamp);
std::string audit_csv(const std::vector<DistributionAuditRow>& rows,
                      bool timestamp);
std::string exponent_csv(const ExponentFitResult& result, bool timestamp);

void write_file(const std::string& path, const std::string& contents);

}  // namespace lpp
