#include "lpp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lpp/lpp_core.hpp"
#include "lpp/oracle.hpp"

namespace lpp {

namespace {

std::string timestamp_line() {
  std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated ") + buf + "\n";
}

}  // namespace

std::vector<double> linspace01(int points) {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i)
    out[i] = static_cast<double>(i) / (points - 1);
  return out;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// transition sweep

SweepResult run_transition_sweep(const SweepConfig& config) {
  const WeightDistribution dist = WeightDistribution::parse(config.dist_spec);
  if (config.n_list.empty())
    throw std::invalid_argument("sweep: n list must be non-empty");
  const bool alpha_mode = !config.alpha_list.empty();
  if (alpha_mode && !config.t_list.empty())
    throw std::invalid_argument("sweep: give either t values or alpha values");
  if (!alpha_mode && config.t_list.empty())
    throw std::invalid_argument("sweep: no t or alpha values given");
  if (config.pilot_replicates < 1000)
    throw std::invalid_argument("sweep: pilot replicates must be >= 1000");
  for (double t : config.t_list)
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("sweep: t values must lie in [0,1]");

  std::vector<int> ns = config.n_list;
  std::sort(ns.begin(), ns.end());

  SweepResult result;
  for (int n : ns) {
    const Grid grid(n, config.d);
    const std::uint64_t cell_seed =
        rng::derive_seed(config.seed, static_cast<std::uint64_t>(n));
    const std::uint64_t pilot_seed = rng::derive_seed(cell_seed, 1);
    const std::uint64_t stats_seed = rng::derive_seed(cell_seed, 2);

    const VarianceEstimate pilot = estimate_variance(
        grid, dist, config.pilot_replicates, pilot_seed, config.par);
    result.pilots.push_back(
        {n, pilot.variance, pilot.variance_se, pilot.replicates, pilot_seed});

    std::vector<double> times;
    if (alpha_mode) {
      for (double alpha : config.alpha_list) {
        if (!(alpha > 0.0))
          throw std::invalid_argument("sweep: alpha values must be > 0");
        // The admissible range of Theorem-style rescaling is t <= 1; at
        // desk scale alpha*Var/n can exceed it, so clamp to full resampling.
        times.push_back(std::min(1.0, alpha * pilot.variance / n));
      }
    } else {
      times = config.t_list;
    }
    std::sort(times.begin(), times.end());

    for (double t : times) {
      const PassageStats stats = estimate_passage_stats(
          grid, dist, t, config.replicates, stats_seed, config.par);
      SweepRow row;
      row.n = n;
      row.d = config.d;
      row.t = t;
      row.alpha = pilot.variance > 0.0 ? t * n / pilot.variance
                                       : std::numeric_limits<double>::infinity();
      row.q = stats.q_t.estimate;
      row.q_se = stats.q_t.std_error;
      row.corr = stats.corr.estimate;
      row.corr_se = stats.corr.std_error;
      row.l2 = stats.l2.estimate;
      row.l2_se = stats.l2.std_error;
      row.overlap = stats.overlap.estimate;
      row.overlap_se = stats.overlap.std_error;
      row.overlap_fraction =
          stats.overlap.estimate / (static_cast<double>(config.d) * n + 1.0);
      row.var_t = stats.var_t0.estimate;
      row.var_t_se = stats.var_t0.std_error;
      row.replicates = config.replicates;
      row.seed = stats_seed;
      result.rows.push_back(row);
    }
  }

  nlohmann::json pilots = nlohmann::json::array();
  for (const auto& p : result.pilots) {
    pilots.push_back({{"n", p.n},
                      {"var_T", p.var},
                      {"var_T_se", p.var_se},
                      {"replicates", p.replicates},
                      {"seed", p.seed}});
  }
  result.summary = {{"command", "sweep"},
                    {"dist", config.dist_spec},
                    {"d", config.d},
                    {"replicates", config.replicates},
                    {"seed", config.seed},
                    {"alpha_mode", alpha_mode},
                    {"pilots", pilots},
                    {"rows", result.rows.size()}};

  if (!config.out_csv.empty())
    write_file(config.out_csv, sweep_csv(result.rows, config.timestamp));
  if (!config.out_json.empty())
    write_file(config.out_json, result.summary.dump(2) + "\n");
  return result;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool timestamp) {
  std::ostringstream out;
  if (timestamp) out << timestamp_line();
  out << "n,d,t,alpha,Q_t,Q_t_se,corr,corr_se,l2,l2_se,overlap,overlap_se,"
         "overlap_fraction,var_T,var_T_se,replicates,seed\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.d << ',' << format_double(r.t) << ','
        << format_double(r.alpha) << ',' << format_double(r.q) << ','
        << format_double(r.q_se) << ',' << format_double(r.corr) << ','
        << format_double(r.corr_se) << ',' << format_double(r.l2) << ','
        << format_double(r.l2_se) << ',' << format_double(r.overlap) << ','
        << format_double(r.overlap_se) << ','
        << format_double(r.overlap_fraction) << ',' << format_double(r.var_t)
        << ',' << format_double(r.var_t_se) << ',' << r.replicates << ','
        << r.seed << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// variance exponent fit

LineFit fit_log_log(const std::vector<FitPoint>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit: need >= 2 points");
  const double n = static_cast<double>(points.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& p : points) {
    mean_x += p.x;
    mean_y += p.y;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    sxx += (p.x - mean_x) * (p.x - mean_x);
    sxy += (p.x - mean_x) * (p.y - mean_y);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit: degenerate x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double var_slope = 0.0;
  for (const auto& p : points) {
    const double c = (p.x - mean_x) / sxx;
    var_slope += c * c * p.y_sigma * p.y_sigma;
  }
  fit.slope_se = std::sqrt(var_slope);
  return fit;
}

ExponentFitResult fit_variance_exponent(const WeightDistribution& dist, int d,
                                        const std::vector<int>& n_list,
                                        std::uint64_t replicates,
                                        std::uint64_t seed,
                                        const ParallelOptions& par) {
  if (n_list.size() < 4)
    throw std::invalid_argument("fit-exponent: need >= 4 grid sizes");
  const auto [lo, hi] = std::minmax_element(n_list.begin(), n_list.end());
  if (*hi < 8 * *lo)
    throw std::invalid_argument("fit-exponent: sizes must span a factor >= 8");

  ExponentFitResult result;
  result.n_list = n_list;
  std::sort(result.n_list.begin(), result.n_list.end());

  std::vector<FitPoint> points;
  for (int n : result.n_list) {
    const Grid grid(n, d);
    const std::uint64_t n_seed =
        rng::derive_seed(seed, static_cast<std::uint64_t>(n));
    VarianceEstimate est =
        estimate_variance(grid, dist, replicates, n_seed, par);
    points.push_back({std::log(static_cast<double>(n)), std::log(est.variance),
                      est.variance_se / est.variance});
    result.estimates.push_back(est);
  }
  result.fit = fit_log_log(points);

  nlohmann::json sizes = nlohmann::json::array();
  for (size_t i = 0; i < result.n_list.size(); ++i) {
    sizes.push_back({{"n", result.n_list[i]},
                     {"var_T", result.estimates[i].variance},
                     {"var_T_se", result.estimates[i].variance_se},
                     {"mean_T", result.estimates[i].mean},
                     {"seed", result.estimates[i].seed}});
  }
  result.summary = {{"command", "fit-exponent"},
                    {"dist", dist.spec()},
                    {"d", d},
                    {"replicates", replicates},
                    {"seed", seed},
                    {"slope", result.fit.slope},
                    {"intercept", result.fit.intercept},
                    {"slope_se", result.fit.slope_se},
                    {"sizes", sizes}};
  return result;
}

std::string exponent_csv(const ExponentFitResult& result, bool timestamp) {
  std::ostringstream out;
  if (timestamp) out << timestamp_line();
  out << "n,var_T,var_T_se,mean_T,replicates,seed\n";
  for (size_t i = 0; i < result.n_list.size(); ++i) {
    const auto& e = result.estimates[i];
    out << result.n_list[i] << ',' << format_double(e.variance) << ','
        << format_double(e.variance_se) << ',' << format_double(e.mean) << ','
        << e.replicates << ',' << e.seed << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// identity suite

IdentitySuiteResult run_identity_suite(const IdentitySuiteConfig& config) {
  const WeightDistribution dist = WeightDistribution::parse(config.dist_spec);
  const Grid grid(config.n, config.d);
  const Grid grid_stab(config.n_stability, config.d);

  nlohmann::json checks = nlohmann::json::array();
  bool all_pass = true;

  // Covariance formula (variance = integral of summed co-influences).
  {
    const auto report = verify_covariance_formula(
        grid, dist, linspace01(config.time_grid_points), config.replicates,
        config.vertex_sample, rng::derive_seed(config.seed, 10), config.par);
    checks.push_back({{"name", "covariance_formula"},
                      {"pass", report.formula_ok},
                      {"integral", report.integral},
                      {"integral_se", report.integral_se},
                      {"var_T", report.variance},
                      {"var_T_se", report.variance_se},
                      {"bracket_bound", report.bracket_bound},
                      {"discrepancy", report.discrepancy}});
    checks.push_back({{"name", "influence_upper_bound"},
                      {"pass", report.upper_bound_ok},
                      {"influence_at_0", report.influence.front()},
                      {"var_T", report.variance}});
    all_pass = all_pass && report.formula_ok && report.upper_bound_ok;
  }

  // Derivative identity -dQ/dt = sum of co-influences.
  {
    const auto report = verify_derivative_identity(
        grid, dist, config.fd_t, config.fd_h, config.replicates,
        config.vertex_sample, rng::derive_seed(config.seed, 11), config.par);
    checks.push_back({{"name", "derivative_identity"},
                      {"pass", report.ok},
                      {"t", report.t},
                      {"h", report.h},
                      {"finite_difference", report.finite_difference},
                      {"finite_difference_se", report.finite_difference_se},
                      {"total_influence", report.influence},
                      {"total_influence_se", report.influence_se},
                      {"delta", report.delta},
                      {"delta_se", report.delta_se}});
    all_pass = all_pass && report.ok;
  }

  // Per-vertex upper/lower influence bounds.
  if (!dist.conditional_variance_floor().satisfied) {
    checks.push_back({{"name", "lemma_bounds"},
                      {"skipped", "fails condition (1.5)"},
                      {"dist", dist.spec()}});
  } else {
    for (size_t i = 0; i < config.lemma_times.size(); ++i) {
      const auto report = verify_lemma_bounds(
          grid, dist, config.lemma_times[i], config.replicates,
          rng::derive_seed(config.seed, 20 + i), config.vertex_sample,
          config.par);
      std::uint32_t upper_fail = 0, lower_fail = 0;
      for (const auto& row : report.rows) {
        upper_fail += row.upper_ok ? 0 : 1;
        lower_fail += row.lower_ok ? 0 : 1;
      }
      checks.push_back({{"name", "lemma_bounds"},
                        {"pass", report.all_ok},
                        {"t", report.t},
                        {"c_hat", report.c_hat},
                        {"vertices", report.rows.size()},
                        {"upper_failures", upper_fail},
                        {"lower_failures", lower_fail}});
      all_pass = all_pass && report.all_ok;
    }
  }

  // L2 stability chain and Cov = Var - L2/2 reconciliation.
  for (size_t i = 0; i < config.stability_times.size(); ++i) {
    const auto report = verify_stability_bound(
        grid_stab, dist, config.stability_times[i], config.replicates,
        rng::derive_seed(config.seed, 30 + i), config.par);
    const bool ok =
        report.l2_bound_ok && report.majorant_ok && report.reconciliation_ok;
    checks.push_back({{"name", "stability_bound"},
                      {"pass", ok},
                      {"t", report.t},
                      {"l2", report.l2},
                      {"l2_se", report.l2_se},
                      {"bound_margin", report.bound_margin},
                      {"bound_margin_se", report.bound_margin_se},
                      {"majorant_margin", report.majorant_margin},
                      {"reconciliation_gap", report.reconciliation_gap},
                      {"reconciliation_se", report.reconciliation_se}});
    all_pass = all_pass && ok;
  }

  // Monotone decay of Q_t, Corr, overlap and sampled co-influences.
  {
    const auto report = monotonicity_suite(
        grid, dist, linspace01(config.monotonicity_points), config.replicates,
        config.vertex_sample, rng::derive_seed(config.seed, 40), config.par);
    const bool ok =
        report.q_ok && report.corr_ok && report.overlap_ok && report.influence_ok;
    checks.push_back({{"name", "monotonicity"},
                      {"pass", ok},
                      {"q_ok", report.q_ok},
                      {"corr_ok", report.corr_ok},
                      {"overlap_ok", report.overlap_ok},
                      {"influence_ok", report.influence_ok},
                      {"worst_margin_sigma", report.worst_margin}});
    all_pass = all_pass && ok;
  }

  IdentitySuiteResult result;
  result.all_pass = all_pass;
  result.verdicts = {{"command", "identities"},
                     {"dist", config.dist_spec},
                     {"d", config.d},
                     {"n", config.n},
                     {"n_stability", config.n_stability},
                     {"replicates", config.replicates},
                     {"vertex_sample", config.vertex_sample},
                     {"seed", config.seed},
                     {"all_pass", all_pass},
                     {"checks", checks}};
  return result;
}

// ---------------------------------------------------------------------------
// distribution audit

DistributionAuditResult run_distribution_audit(
    const std::vector<std::string>& dist_specs,
    const std::vector<double>& k_grid, int d) {
  DistributionAuditResult result;
  nlohmann::json dists = nlohmann::json::array();

  for (const std::string& spec : dist_specs) {
    const WeightDistribution dist = WeightDistribution::parse(spec);
    const auto moment = dist.check_moment_condition(d);
    const auto floor = dist.conditional_variance_floor(k_grid);

    std::vector<FitPoint> bk_points;
    for (double k : k_grid) {
      DistributionAuditRow row;
      row.dist = spec;
      row.k = k;
      row.var_floor = floor.floor;
      row.floor_ok = floor.satisfied;
      row.moment_value = moment.value;
      row.moment_ok = moment.satisfied;
      try {
        const auto stats = dist.conditional_tail_stats(k);
        row.cond_mean = stats.mean;
        row.cond_var = stats.variance;
        row.excess_mean = stats.mean - k;
        if (k >= 10.0 && row.excess_mean > 0.0)
          bk_points.push_back(
              {std::log(k), std::log(row.excess_mean), 0.0});
      } catch (const DegenerateTailError&) {
        row.cond_mean = std::numeric_limits<double>::quiet_NaN();
        row.cond_var = std::numeric_limits<double>::quiet_NaN();
        row.excess_mean = std::numeric_limits<double>::quiet_NaN();
      }
      result.rows.push_back(row);
    }

    nlohmann::json entry = {{"dist", spec},
                            {"moment_value", moment.value},
                            {"moment_ok", moment.satisfied},
                            {"var_floor", floor.floor},
                            {"floor_ok", floor.satisfied}};
    if (bk_points.size() >= 2) {
      const LineFit fit = fit_log_log(bk_points);
      entry["bk_loglog_slope"] = fit.slope;
    }
    dists.push_back(entry);
  }

  result.summary = {{"command", "dist-audit"}, {"d", d}, {"dists", dists}};
  return result;
}

std::string audit_csv(const std::vector<DistributionAuditRow>& rows,
                      bool timestamp) {
  std::ostringstream out;
  if (timestamp) out << timestamp_line();
  out << "dist,k,cond_mean,cond_var,b_k,var_floor,floor_ok,moment_value,"
         "moment_ok\n";
  for (const auto& r : rows) {
    out << r.dist << ',' << format_double(r.k) << ','
        << format_double(r.cond_mean) << ',' << format_double(r.cond_var)
        << ',' << format_double(r.excess_mean) << ','
        << format_double(r.var_floor) << ',' << (r.floor_ok ? 1 : 0) << ','
        << format_double(r.moment_value) << ',' << (r.moment_ok ? 1 : 0)
        << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// brute-force oracle suite

OracleSuiteResult run_oracle_suite(const OracleSuiteConfig& config) {
  OracleSuiteResult result;
  result.pass = true;
  nlohmann::json cases = nlohmann::json::array();

  const std::vector<std::pair<int, int>> geometries = {
      {2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 1}, {3, 2}};

  auto rel_error = [](double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
  };

  std::uint64_t case_id = 0;
  for (const std::string& spec : config.dist_specs) {
    const WeightDistribution dist = WeightDistribution::parse(spec);
    const bool exact = dist.integer_valued();
    for (const auto& [d, n] : geometries) {
      ++case_id;
      const Grid grid(n, d);
      const std::uint64_t count = grid.vertex_count();
      std::uint64_t case_failures = 0;
      SweepWorkspace sweep;

      for (std::uint64_t c = 0; c < config.configs_per_case; ++c) {
        const std::uint64_t cfg_seed =
            rng::derive_seed(config.seed, case_id * 1000003 + c);
        Configuration cfg{&grid,
                          sample_field(grid, dist, cfg_seed,
                                       rng::Tag::base_weights),
                          exact};
        const lpp::oracle::BruteForce brute = lpp::oracle::evaluate(cfg);
        const PassageResult res = passage_time(cfg);

        auto compare = [&](double got, double want) {
          ++result.comparisons;
          const double err = rel_error(got, want);
          result.max_rel_error = std::max(result.max_rel_error, err);
          const bool ok =
              exact ? got == want : err <= config.continuous_rel_tol;
          if (!ok) {
            ++result.failures;
            ++case_failures;
          }
        };

        compare(res.time, brute.time);
        for (VertexIndex v = 0; v < count; ++v) {
          const auto avoid = avoid_passage_time(cfg, v, sweep);
          if (avoid.has_value() != brute.avoid[v].has_value()) {
            ++result.comparisons;
            ++result.failures;
            ++case_failures;
          } else if (avoid) {
            compare(*avoid, *brute.avoid[v]);
          }
          compare(threshold_weight(cfg, res, v, sweep),
                  lpp::oracle::threshold(brute, v));
        }
        // Spot-check single-weight replacement at a few (v, x) pairs by
        // direct enumeration.
        rng::Stream xs(cfg_seed, 2, rng::Tag::oracle);
        for (int probe = 0; probe < 3; ++probe) {
          const VertexIndex v = static_cast<VertexIndex>(
              xs.next_u01() * static_cast<double>(count));
          const double k = threshold_weight(cfg, res, v, sweep);
          const double choices[] = {0.0, k, k + 0.75, cfg.weights[v],
                                    2.0 * cfg.weights[v] + 1.0};
          const double x =
              choices[static_cast<int>(xs.next_u01() * 5.0) % 5];
          compare(resampled_passage_time(cfg, res, v, x, sweep),
                  lpp::oracle::resampled(cfg, v, x));
        }
      }
      cases.push_back({{"dist", spec},
                       {"d", d},
                       {"n", n},
                       {"configs", config.configs_per_case},
                       {"failures", case_failures}});
      if (case_failures > 0) result.pass = false;
    }
  }

  // Threshold contract: geodesic membership flips at k_v +- epsilon.
  {
    const WeightDistribution dist = WeightDistribution::exponential(1.0);
    const Grid grid(5, 2);
    const std::uint64_t count = grid.vertex_count();
    std::uint64_t flip_failures = 0;
    SweepWorkspace sweep;
    for (std::uint64_t c = 0; c < config.threshold_configs; ++c) {
      const std::uint64_t cfg_seed =
          rng::derive_seed(config.seed, 0xF11F000000ULL + c);
      Configuration cfg{
          &grid, sample_field(grid, dist, cfg_seed, rng::Tag::base_weights),
          false};
      const PassageResult res = passage_time(cfg);
      Configuration mod = cfg;
      for (VertexIndex v = 0; v < count; ++v) {
        const double k = threshold_weight(cfg, res, v, sweep);
        mod.weights[v] = k + config.flip_epsilon;
        ++result.flip_checks;
        if (!passage_time(mod).in_geodesic[v]) {
          ++flip_failures;
        }
        if (k >= config.flip_epsilon) {
          mod.weights[v] = k - config.flip_epsilon;
          ++result.flip_checks;
          if (passage_time(mod).in_geodesic[v]) {
            ++flip_failures;
          }
        }
        mod.weights[v] = cfg.weights[v];
      }
    }
    result.flip_failures = flip_failures;
    if (flip_failures > 0) result.pass = false;
  }

  result.summary = {{"command", "oracle"},
                    {"pass", result.pass},
                    {"comparisons", result.comparisons},
                    {"failures", result.failures},
                    {"max_rel_error", result.max_rel_error},
                    {"flip_checks", result.flip_checks},
                    {"flip_failures", result.flip_failures},
                    {"cases", cases}};
  return result;
}

}  // namespace lpp
