// Command-line front end: transition sweeps, the variance-exponent fit,
// the identity suite, the distribution audit and the brute-force oracle
// suite.  Exit codes: 0 success, 1 identity/oracle failure, 2 bad
// configuration or I/O.

#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lpp/experiments.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw CLI::ValidationError("bad integer list");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw CLI::ValidationError("bad number list");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(tok);
  return out;
}

// Flat key = value file; '#' starts a comment.  Keys are the long flag
// names of the chosen subcommand; explicit CLI flags override the file.
std::map<std::string, std::string> load_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not key = value: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) throw std::invalid_argument("empty config key");
    out[key] = value;
  }
  return out;
}

// Typed setters for config keys, one binder per subcommand.
class ConfigBinder {
 public:
  void bind(const std::string& key, std::string* target) {
    setters_[key] = [target](const std::string& v) { *target = v; };
  }
  void bind(const std::string& key, int* target) {
    setters_[key] = [target](const std::string& v) { *target = std::stoi(v); };
  }
  void bind(const std::string& key, std::uint32_t* target) {
    setters_[key] = [target](const std::string& v) {
      *target = static_cast<std::uint32_t>(std::stoul(v));
    };
  }
  void bind(const std::string& key, std::uint64_t* target) {
    setters_[key] = [target](const std::string& v) {
      *target = std::stoull(v);
    };
  }
  void bind(const std::string& key, bool* target) {
    setters_[key] = [target](const std::string& v) {
      if (v == "true" || v == "1") *target = true;
      else if (v == "false" || v == "0") *target = false;
      else throw std::invalid_argument("bad boolean: " + v);
    };
  }
  void apply(const std::map<std::string, std::string>& values) const {
    for (const auto& [key, value] : values) {
      const auto it = setters_.find(key);
      if (it == setters_.end())
        throw std::invalid_argument("unknown config key: " + key);
      try {
        it->second(value);
      } catch (const std::invalid_argument&) {
        throw;
      } catch (const std::exception&) {
        throw std::invalid_argument("bad value for config key " + key + ": " +
                                    value);
      }
    }
  }

 private:
  std::map<std::string, std::function<void(const std::string&)>> setters_;
};

struct CommonArgs {
  std::string config_path;
  std::string dist = "exp:1.0";
  int dim = 2;
  std::uint64_t reps = 0;  // per-command default fills this
  std::uint64_t seed = 1;
  std::uint32_t vertex_sample = 64;
  std::string out;
  std::string json_summary;
  int threads = 0;
  bool no_timestamp = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, ConfigBinder& binder,
                std::uint64_t default_reps) {
  args.reps = default_reps;
  cmd->add_option("--config", args.config_path,
                  "flat key = value config file (flags override it)");
  binder.bind("dist", &args.dist);
  binder.bind("dim", &args.dim);
  binder.bind("reps", &args.reps);
  binder.bind("seed", &args.seed);
  binder.bind("vertex-sample", &args.vertex_sample);
  binder.bind("out", &args.out);
  binder.bind("json-summary", &args.json_summary);
  binder.bind("threads", &args.threads);
  binder.bind("no-timestamp", &args.no_timestamp);
  cmd->add_option("--dist", args.dist,
                  "weight law: exp:L | geom:P | pareto:G | stretched:B:BB | "
                  "unif01 | const:C");
  cmd->add_option("--dim", args.dim, "lattice dimension d >= 2");
  cmd->add_option("--reps", args.reps, "Monte Carlo replicates");
  cmd->add_option("--seed", args.seed, "master seed");
  cmd->add_option("--vertex-sample", args.vertex_sample,
                  "vertices sampled per replicate in influence estimators");
  cmd->add_option("--out", args.out, "CSV output path");
  cmd->add_option("--json-summary", args.json_summary, "JSON summary path");
  cmd->add_option("--threads", args.threads, "OpenMP threads (0 = default)");
  cmd->add_flag("--no-timestamp", args.no_timestamp,
                "suppress the timestamp header line in CSV output");
}

lpp::ParallelOptions par_options(const CommonArgs& args) {
  lpp::ParallelOptions par;
  par.threads = args.threads;
  return par;
}

void maybe_write_json(const std::string& path, const nlohmann::json& doc) {
  if (!path.empty()) lpp::write_file(path, doc.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic last-passage percolation experiments"};
  app.require_subcommand(1);

  std::map<std::string, ConfigBinder> binders;

  // --- sweep ---------------------------------------------------------------
  auto* sweep = app.add_subcommand(
      "sweep", "Q_t / correlation / overlap over an (n, t) grid");
  CommonArgs sweep_args;
  add_common(sweep, sweep_args, binders["sweep"], 1000);
  std::string sweep_n = "8,16", sweep_t, sweep_alpha;
  std::uint64_t pilot_reps = 1000;
  sweep->add_option("--n", sweep_n, "comma-separated side lengths");
  sweep->add_option("--t", sweep_t, "comma-separated times in [0,1]");
  sweep->add_option("--alpha", sweep_alpha,
                    "rescaled times: t = alpha * Var(T)/n (clamped to 1)");
  sweep->add_option("--pilot-reps", pilot_reps,
                    "replicates for the pilot Var(T) estimate (>= 1000)");
  binders["sweep"].bind("n", &sweep_n);
  binders["sweep"].bind("t", &sweep_t);
  binders["sweep"].bind("alpha", &sweep_alpha);
  binders["sweep"].bind("pilot-reps", &pilot_reps);

  // --- fit-exponent ----------------------------------------------------------
  auto* fit = app.add_subcommand(
      "fit-exponent", "log-log fit of Var(T) against n (d=2 KPZ exponent)");
  CommonArgs fit_args;
  add_common(fit, fit_args, binders["fit-exponent"], 10000);
  std::string fit_n = "16,32,64,128,256";
  fit->add_option("--n", fit_n, "comma-separated side lengths (>= 4, span 8x)");
  binders["fit-exponent"].bind("n", &fit_n);

  // --- identities -------------------------------------------------------------
  auto* ident = app.add_subcommand(
      "identities", "covariance formula, derivative identity, lemma bounds, "
                    "stability chain, monotonicity");
  CommonArgs ident_args;
  add_common(ident, ident_args, binders["identities"], 100000);
  int ident_n = 4;
  int ident_n_stability = 0;  // 0: 2n
  ident->add_option("--n", ident_n, "side length for the identity checks");
  ident->add_option("--n-stability", ident_n_stability,
                    "side length for the stability chain (default 2n)");
  binders["identities"].bind("n", &ident_n);
  binders["identities"].bind("n-stability", &ident_n_stability);

  // --- dist-audit --------------------------------------------------------------
  auto* audit = app.add_subcommand(
      "dist-audit", "moment condition and conditional-tail statistics");
  CommonArgs audit_args;
  add_common(audit, audit_args, binders["dist-audit"], 0);
  std::string audit_dists = "exp:1.0,geom:0.5,pareto:3.0,stretched:0.5:1.0,unif01";
  std::string audit_k = "0,1,2,5,10,50,100,1000,10000";
  audit->add_option("--dist-list", audit_dists, "comma-separated laws");
  audit->add_option("--k", audit_k, "comma-separated tail thresholds");
  binders["dist-audit"].bind("dist-list", &audit_dists);
  binders["dist-audit"].bind("k", &audit_k);

  // --- oracle -------------------------------------------------------------------
  auto* oracle = app.add_subcommand(
      "oracle", "brute-force equivalence and threshold-contract suite");
  CommonArgs oracle_args;
  add_common(oracle, oracle_args, binders["oracle"], 0);
  std::uint64_t oracle_configs = 1000, oracle_threshold_configs = 200;
  oracle->add_option("--configs", oracle_configs,
                     "random configurations per (d, n, law) case");
  oracle->add_option("--threshold-configs", oracle_threshold_configs,
                     "configurations for the membership-flip contract");
  binders["oracle"].bind("configs", &oracle_configs);
  binders["oracle"].bind("threshold-configs", &oracle_threshold_configs);

  // Apply a --config file (if any) as defaults before parsing, so explicit
  // command-line flags override it.
  try {
    std::string config_path;
    for (int i = 1; i + 1 < argc || i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
      else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }
    if (!config_path.empty()) {
      if (argc < 2)
        throw std::invalid_argument("--config requires a subcommand");
      const std::string sub = argv[1];
      const auto it = binders.find(sub);
      if (it == binders.end())
        throw std::invalid_argument("unknown subcommand for --config: " + sub);
      it->second.apply(load_flat_config(config_path));
    }
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sweep->parsed()) {
#ifdef _OPENMP
      if (sweep_args.threads > 0) omp_set_num_threads(sweep_args.threads);
#endif
      lpp::SweepConfig config;
      config.dist_spec = sweep_args.dist;
      config.d = sweep_args.dim;
      config.n_list = parse_int_list(sweep_n);
      if (!sweep_t.empty()) config.t_list = parse_double_list(sweep_t);
      if (!sweep_alpha.empty())
        config.alpha_list = parse_double_list(sweep_alpha);
      config.replicates = sweep_args.reps;
      config.pilot_replicates = pilot_reps;
      config.seed = sweep_args.seed;
      config.out_csv = sweep_args.out;
      config.out_json = sweep_args.json_summary;
      config.timestamp = !sweep_args.no_timestamp;
      config.par = par_options(sweep_args);
      const auto result = lpp::run_transition_sweep(config);
      if (config.out_csv.empty())
        std::cout << lpp::sweep_csv(result.rows, config.timestamp);
      else
        std::cout << "wrote " << result.rows.size() << " rows to "
                  << config.out_csv << "\n";
      return 0;
    }

    if (fit->parsed()) {
#ifdef _OPENMP
      if (fit_args.threads > 0) omp_set_num_threads(fit_args.threads);
#endif
      const auto dist = lpp::WeightDistribution::parse(fit_args.dist);
      const auto result = lpp::fit_variance_exponent(
          dist, fit_args.dim, parse_int_list(fit_n), fit_args.reps,
          fit_args.seed, par_options(fit_args));
      if (!fit_args.out.empty())
        lpp::write_file(fit_args.out,
                        lpp::exponent_csv(result, !fit_args.no_timestamp));
      maybe_write_json(fit_args.json_summary, result.summary);
      std::printf("slope %.6f +- %.6f  intercept %.6f\n", result.fit.slope,
                  result.fit.slope_se, result.fit.intercept);
      return 0;
    }

    if (ident->parsed()) {
#ifdef _OPENMP
      if (ident_args.threads > 0) omp_set_num_threads(ident_args.threads);
#endif
      lpp::IdentitySuiteConfig config;
      config.dist_spec = ident_args.dist;
      config.d = ident_args.dim;
      config.n = ident_n;
      config.n_stability = ident_n_stability > 0 ? ident_n_stability : 2 * ident_n;
      config.replicates = ident_args.reps;
      config.vertex_sample = ident_args.vertex_sample;
      config.seed = ident_args.seed;
      config.par = par_options(ident_args);
      const auto result = lpp::run_identity_suite(config);
      maybe_write_json(ident_args.json_summary, result.verdicts);
      for (const auto& check : result.verdicts["checks"]) {
        const std::string name = check.at("name");
        if (check.contains("skipped")) {
          std::printf("[skip] %-22s %s\n", name.c_str(),
                      check.at("skipped").get<std::string>().c_str());
        } else {
          const bool pass = check.at("pass");
          std::printf("[%s] %-22s\n", pass ? "pass" : "FAIL", name.c_str());
        }
      }
      std::printf("%s\n", result.all_pass ? "all identities pass"
                                          : "identity suite FAILED");
      return result.all_pass ? 0 : 1;
    }

    if (audit->parsed()) {
      const auto result = lpp::run_distribution_audit(
          parse_string_list(audit_dists), parse_double_list(audit_k),
          audit_args.dim);
      const std::string csv =
          lpp::audit_csv(result.rows, !audit_args.no_timestamp);
      if (audit_args.out.empty())
        std::cout << csv;
      else
        lpp::write_file(audit_args.out, csv);
      maybe_write_json(audit_args.json_summary, result.summary);
      return 0;
    }

    if (oracle->parsed()) {
      lpp::OracleSuiteConfig config;
      config.configs_per_case = oracle_configs;
      config.threshold_configs = oracle_threshold_configs;
      config.seed = oracle_args.seed;
      const auto result = lpp::run_oracle_suite(config);
      maybe_write_json(oracle_args.json_summary, result.summary);
      std::printf(
          "%llu comparisons, %llu failures, max rel err %.3e; "
          "%llu flip checks, %llu failures\n",
          static_cast<unsigned long long>(result.comparisons),
          static_cast<unsigned long long>(result.failures),
          result.max_rel_error,
          static_cast<unsigned long long>(result.flip_checks),
          static_cast<unsigned long long>(result.flip_failures));
      std::printf("%s\n", result.pass ? "oracle suite pass"
                                      : "oracle suite FAILED");
      return result.pass ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
