#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "qsfp/analysis.hpp"
#include "qsfp/attraction.hpp"
#include "qsfp/fixed_point.hpp"
#include "qsfp/io.hpp"
#include "qsfp/parallel.hpp"
#include "qsfp/quicksort.hpp"
#include "qsfp/report.hpp"
#include "qsfp/transform.hpp"

namespace qsfp::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string command;
  std::uint64_t seed = 42;
  std::size_t sample_size = 1'000'000;
  std::size_t iterations = 30;
  GridSpec grid{};
  std::string output_dir;
  std::string format = "json";
  unsigned threads = 0;
  double tolerance = 0.02;

  // Subcommand parameters.
  double m = 0.0;
  double sigma = 0.0;
  std::size_t n = 10'000;
  std::size_t reps = 0;  ///< 0: per-command default
  std::vector<unsigned> levels_n{5, 10, 15, 20};
  std::vector<double> xs{0.5, 1.0, 2.0};
  std::string source = "pareto";
  double rate = 1.0;
  unsigned max_level = 12;
  unsigned levels = 10;
  bool estimate_target = false;
  bool diagonal = false;
  std::string input;
  std::string cf_input;
};

Json config_json(const RunConfig& c) {
  Json j = {{"command", c.command},
            {"seed", c.seed},
            {"sample_size", c.sample_size},
            {"iterations", c.iterations},
            {"grid", {{"t_min", c.grid.t_min}, {"t_max", c.grid.t_max}, {"points", c.grid.points}}},
            {"output_dir", c.output_dir},
            {"format", c.format},
            {"threads", c.threads},
            {"tolerance", c.tolerance}};
  const std::string& k = c.command;
  if (k == "verify-theorem1" || k == "coupling" || k == "attraction") {
    j["m"] = c.m;
    j["sigma"] = c.sigma;
  }
  if (k == "simulate-quicksort") j["n"] = c.n;
  if (k == "simulate-quicksort" || k == "chernoff" || k == "attraction") j["reps"] = c.reps;
  if (k == "chernoff") {
    j["levels_n"] = c.levels_n;
    j["x"] = c.xs;
  }
  if (k == "attraction") {
    j["source"] = c.source;
    j["rate"] = c.rate;
    j["max_level"] = c.max_level;
    j["estimate_target"] = c.estimate_target;
  }
  if (k == "coupling") {
    j["levels"] = c.levels;
    j["diagonal"] = c.diagonal;
  }
  if (!c.input.empty()) j["input"] = c.input;
  if (!c.cf_input.empty()) j["cf_input"] = c.cf_input;
  return j;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, format_double(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

class Run {
 public:
  Run(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out), rng_(cfg.seed) {}

  RngStream& rng() { return rng_; }
  const RunConfig& cfg() const { return cfg_; }
  fs::path path(const std::string& name) const { return fs::path(cfg_.output_dir) / name; }

  void summary(const std::string& key, double v) {
    out_ << std::left << std::setw(28) << key << ' ' << format_double(v) << '\n';
  }
  void summary(const std::string& key, const std::string& v) {
    out_ << std::left << std::setw(28) << key << ' ' << v << '\n';
  }

  /// Writes <stem>.json or <stem>.csv and returns the exit code for `passed`.
  int finish(const std::string& stem, Json result, bool passed) {
    Json report = {{"tool", "qsfp"},
                   {"version", QSFP_VERSION},
                   {"config", config_json(cfg_)},
                   {"result", std::move(result)},
                   {"passed", passed}};
    if (cfg_.format == "csv") {
      std::vector<std::pair<std::string, std::string>> rows;
      flatten(report, "", rows);
      std::ofstream f(path(stem + ".csv"));
      if (!f) throw std::runtime_error("cannot write " + path(stem + ".csv").string());
      f << "key,value\n";
      for (const auto& [k, v] : rows) f << k << ',' << v << '\n';
    } else {
      write_json(path(stem + ".json"), report);
    }
    summary("passed", passed ? "yes" : "no");
    return passed ? kExitOk : kExitCheckFailed;
  }

  EmpiricalDist load_or_build_mu() {
    if (!cfg_.input.empty()) return read_sample_csv(cfg_.input);
    RngStream s = rng_.substream(1000);
    return approximate_mu(cfg_.iterations, cfg_.sample_size, s);
  }

 private:
  RunConfig cfg_;
  std::ostream& out_;
  RngStream rng_;
};

int cmd_approx_mu(Run& run) {
  RngStream s_mu = run.rng().substream(0), s_res = run.rng().substream(1);
  const auto& c = run.cfg();
  const EmpiricalDist mu = approximate_mu(c.iterations, c.sample_size, s_mu);
  write_sample_csv(run.path("mu.csv"), mu);
  FixedPointReport rep = residual(mu, s_res, make_grid(c.grid));
  rep.iterations = c.iterations;
  const double target = limit_variance();
  const double rel = std::abs(rep.variance - target) / target;
  run.summary("variance", rep.variance);
  run.summary("variance_target", target);
  run.summary("mean", rep.mean);
  run.summary("residual_cf", rep.residual_cf);
  Json result = to_json(rep);
  result["variance_target"] = target;
  result["variance_rel_error"] = rel;
  return run.finish("approx_mu", result, rel <= c.tolerance && std::abs(rep.mean) <= 0.005);
}

int cmd_simulate_quicksort(Run& run) {
  const auto& c = run.cfg();
  RngStream s = run.rng().substream(0);
  const EmpiricalDist costs = normalized_costs(c.n, c.reps, s);
  write_sample_csv(run.path("costs.csv"), costs);
  const double se = costs.stddev() / std::sqrt(static_cast<double>(costs.size()));
  run.summary("mean", costs.mean());
  run.summary("variance", costs.variance());
  run.summary("expected_comparisons", expected_comparisons(c.n));
  Json result = {{"n", c.n},
                 {"reps", c.reps},
                 {"expected_comparisons", expected_comparisons(c.n)},
                 {"mean", costs.mean()},
                 {"variance", costs.variance()},
                 {"standard_error", se},
                 {"limit_variance", limit_variance()}};
  return run.finish("simulate_quicksort", result, std::abs(costs.mean()) <= 4.0 * se + 1e-12);
}

int cmd_verify_theorem1(Run& run) {
  const auto& c = run.cfg();
  const EmpiricalDist mu = run.load_or_build_mu();
  RngStream s = run.rng().substream(0);
  Theorem1Options opts;
  opts.grid = c.grid;
  opts.tolerance = c.tolerance;
  opts.sample_size = c.sample_size;
  const Theorem1Report rep = verify_theorem1({c.m, c.sigma}, mu, s, opts);
  run.summary("cf_route_residual", rep.cf_route_residual);
  run.summary("residual_cf", rep.residuals.residual_cf);
  run.summary("residual_ks", rep.residuals.residual_ks);
  return run.finish("verify_theorem1", to_json(rep), rep.passed);
}

int cmd_residual(Run& run) {
  const auto& c = run.cfg();
  const EmpiricalDist d = run.load_or_build_mu();
  RngStream s = run.rng().substream(0);
  FixedPointReport rep = residual(d, s, make_grid(c.grid));
  rep.iterations = c.input.empty() ? c.iterations : 0;
  run.summary("residual_ks", rep.residual_ks);
  run.summary("residual_cf", rep.residual_cf);
  return run.finish("residual", to_json(rep), rep.residual_cf <= c.tolerance);
}

int cmd_analyze_cf(Run& run) {
  const auto& c = run.cfg();
  std::optional<CfGrid> psi;
  std::size_t n = 0;
  if (!c.cf_input.empty()) {
    psi = read_cf_csv(c.cf_input);
  } else {
    const EmpiricalDist d = run.load_or_build_mu();
    n = d.size();
    psi = empirical_cf(d, make_grid(c.grid));
  }
  const IntegralEquationReport ie = integral_equation_residual(*psi);
  SlopeEstimate slope = estimate_beta(*psi);
  Json result = {{"integral_equation_residual", ie.max_residual}};
  write_grid_csv(run.path("integral_equation_residual.csv"), ie.residual);
  write_grid_csv(run.path("b.csv"), b_grid(*psi));
  try {
    const ConstantProfile prof = solution_constant_c(*psi);
    const JEstimate j = estimate_J(*psi, {}, n);
    slope.c = prof.c;
    slope.c_dispersion = prof.dispersion;
    slope.J = j.J;
    slope.consistency = std::abs(slope.beta() - (slope.c - 2.0 * slope.J));
    write_grid_csv(run.path("c_of_t.csv"), prof.c_of_t);
    result["J_detail"] = to_json(j);
  } catch (const std::exception& e) {
    result["c_and_J_error"] = e.what();
  }
  const EnvelopeReport env = envelope_check(*psi);
  GridFunction ratio{env.ts, {}};
  for (double r : env.ratio) ratio.values.emplace_back(r, 0.0);
  write_grid_csv(run.path("envelope.csv"), ratio);
  result["slope"] = to_json(slope);
  result["envelope_c_hat"] = env.c_hat;
  run.summary("beta_re", slope.beta_re);
  run.summary("beta_im", slope.beta_im);
  run.summary("integral_eq_residual", ie.max_residual);
  run.summary("envelope_c_hat", env.c_hat);
  const bool passed = slope.expansion_ok && slope.beta_re <= c.tolerance &&
                      !result.contains("c_and_J_error");
  return run.finish("analyze_cf", result, passed);
}

int cmd_attraction(Run& run) {
  const auto& c = run.cfg();
  SourceSpec src = SourceSpec::symmetric_pareto();
  if (c.source == "cauchy") src = SourceSpec::cauchy({c.m, c.sigma});
  else if (c.source == "exp") src = SourceSpec::exponential(c.rate);
  else if (c.source == "mu") src = SourceSpec::empirical(run.load_or_build_mu());
  else if (c.source != "pareto") throw std::invalid_argument("unknown source " + c.source);
  std::optional<CauchyParams> target;
  if (!c.estimate_target) {
    target = src.known_target();
    if (!target) throw std::invalid_argument("source needs --estimate-target");
  }
  AttractionOptions opts;
  opts.grid = c.grid;
  opts.estimate_sample = c.sample_size;
  RngStream s = run.rng().substream(0);
  const AttractionReport rep = t0_attraction(src, target, c.max_level, c.reps, s, opts);
  write_attraction_csv(run.path("attraction.csv"), rep);
  write_l_n_histogram_csv(run.path("l_n_histogram.csv"), rep);
  run.summary("target_m", rep.target.m);
  run.summary("target_sigma", rep.target.sigma);
  run.summary("final_ks", rep.ks_by_stage.back());
  run.summary("final_w_sd", rep.w_stats.back().sd);
  return run.finish("attraction", to_json(rep), rep.ks_nonincreasing());
}

int cmd_chernoff(Run& run) {
  const auto& c = run.cfg();
  RngStream base = run.rng().substream(0);
  Json cells = Json::array();
  bool passed = true;
  std::uint64_t key = 0;
  for (unsigned n : c.levels_n) {
    for (double x : c.xs) {
      RngStream s = base.substream(key++);
      const ChernoffReport rep = verify_chernoff(n, x, c.reps, s);
      if (!rep.bound.outside_validity) passed = passed && rep.passed;
      cells.push_back(to_json(rep));
      run.summary("n=" + std::to_string(n) + " x=" + format_double(x),
                  format_double(rep.frequency) + " <= " + format_double(rep.bound.value) +
                      (rep.bound.vacuous ? " (vacuous)" : ""));
    }
  }
  return run.finish("chernoff", {{"cells", cells}}, passed);
}

int cmd_coupling(Run& run) {
  const auto& c = run.cfg();
  const EmpiricalDist mu = run.load_or_build_mu();
  RngStream s_c = run.rng().substream(0), s_v = run.rng().substream(1),
            s_x = run.rng().substream(2);
  const EmpiricalDist nu1 =
      (c.m == 0.0 && c.sigma == 0.0)
          ? mu
          : convolve(mu, cauchy_sample({c.m, c.sigma}, mu.size(), s_c), s_v, mu.size());
  CouplingOptions opts;
  opts.grid = c.grid;
  opts.initial = c.diagonal ? InitialCoupling::Diagonal : InitialCoupling::Independent;
  const CouplingReport rep = coupling_experiment(nu1, mu, c.levels, s_x, opts);
  run.summary("target_m", rep.target.m);
  run.summary("target_sigma", rep.target.sigma);
  run.summary("max_marginal_ks", rep.max_marginal_ks());
  run.summary("final_difference", rep.difference_distance.back());
  const bool passed = rep.difference_decreasing() && rep.max_marginal_ks() <= c.tolerance;
  return run.finish("coupling", to_json(rep), passed);
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--seed", c.seed, "Root seed")->capture_default_str();
  sub->add_option("--sample-size", c.sample_size, "Sample size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--iterations", c.iterations, "Iterations of T for the mu approximation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--t-min", c.grid.t_min, "Smallest positive grid point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--t-max", c.grid.t_max, "Largest grid point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--points", c.grid.points, "Grid points after 0")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  sub->add_option("--output-dir", c.output_dir, "Report directory (default $QSFP_OUTPUT_DIR or .)");
  sub->add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)");
  sub->add_option("--tolerance", c.tolerance, "Tolerance for the pass/fail check")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Quicksort fixed-point laboratory", "qsfp"};
  app.set_version_flag("--version", QSFP_VERSION);
  app.require_subcommand(1);

  std::map<std::string, std::function<int(Run&)>> commands;
  auto add = [&](const std::string& name, const std::string& desc, std::function<int(Run&)> fn) {
    CLI::App* sub = app.add_subcommand(name, desc);
    add_common(sub, cfg);
    commands[name] = std::move(fn);
    return sub;
  };

  add("approx-mu", "Approximate mu by iterating T from delta_0", cmd_approx_mu);
  auto* qs = add("simulate-quicksort", "Normalized Quicksort comparison counts",
                 cmd_simulate_quicksort);
  qs->add_option("--n", cfg.n, "Records per sort")->capture_default_str();
  qs->add_option("--reps", cfg.reps, "Replications (default 100000)")->check(CLI::PositiveNumber);
  auto* th = add("verify-theorem1", "Residual of mu * Cauchy(m, sigma) under T", cmd_verify_theorem1);
  th->add_option("--m", cfg.m, "Cauchy center")->capture_default_str();
  th->add_option("--sigma", cfg.sigma, "Cauchy scale")->check(CLI::NonNegativeNumber)->capture_default_str();
  th->add_option("--input", cfg.input, "mu sample CSV instead of a fresh approximation");
  auto* rs = add("residual", "Fixed-point residual of a sample", cmd_residual);
  rs->add_option("--input", cfg.input, "Sample CSV (default: fresh mu approximation)");
  auto* an = add("analyze-cf", "Integral equation, slope, J, c and envelope of a CF", cmd_analyze_cf);
  an->add_option("--input", cfg.input, "Sample CSV");
  an->add_option("--cf", cfg.cf_input, "CF grid CSV (t,re,im)");
  auto* at = add("attraction", "Convergence of T0^n nu to Cauchy", cmd_attraction);
  at->add_option("--source", cfg.source, "Source law")
      ->check(CLI::IsMember({"pareto", "exp", "cauchy", "mu"}))
      ->capture_default_str();
  at->add_option("--m", cfg.m, "Cauchy source center")->capture_default_str();
  at->add_option("--sigma", cfg.sigma, "Cauchy source scale")->check(CLI::NonNegativeNumber);
  at->add_option("--rate", cfg.rate, "Exponential rate")->check(CLI::PositiveNumber);
  at->add_option("--max-level", cfg.max_level, "Largest level n")
      ->check(CLI::Range(0u, kMaxSplitLevel))
      ->capture_default_str();
  at->add_option("--reps", cfg.reps, "Draws of W_n per level (default 20000)")->check(CLI::PositiveNumber);
  at->add_flag("--estimate-target", cfg.estimate_target, "Fit the Cauchy target from the source CF");
  at->add_option("--input", cfg.input, "mu sample CSV for --source mu");
  auto* ch = add("chernoff", "Empirical P(L_n >= e^-x) against the Chernoff bound", cmd_chernoff);
  ch->add_option("--n", cfg.levels_n, "Levels")->capture_default_str();
  ch->add_option("--x", cfg.xs, "Values of x")->capture_default_str();
  ch->add_option("--reps", cfg.reps, "Replications per cell (default 10000)")->check(CLI::PositiveNumber);
  auto* cp = add("coupling", "T2 iteration of a coupling of mu * Cauchy(m, sigma) and mu", cmd_coupling);
  cp->add_option("--m", cfg.m, "Shift of the first law")->capture_default_str();
  cp->add_option("--sigma", cfg.sigma, "Cauchy scale of the first law")->check(CLI::NonNegativeNumber);
  cp->add_option("--levels", cfg.levels, "Levels of T2")->capture_default_str();
  cp->add_flag("--diagonal", cfg.diagonal, "Start from the diagonal coupling");
  cp->add_option("--input", cfg.input, "mu sample CSV");

  std::vector<const char*> argv{"qsfp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << QSFP_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.reps == 0) {
    cfg.reps = cfg.command == "chernoff" ? 10'000 : cfg.command == "attraction" ? 20'000 : 100'000;
  }
  if (cfg.output_dir.empty()) {
    const char* env = std::getenv("QSFP_OUTPUT_DIR");
    cfg.output_dir = env && *env ? env : ".";
  }
  if (cfg.threads > 0) set_thread_count(cfg.threads);

  try {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
      err << "cannot create output directory " << cfg.output_dir << '\n';
      return kExitUsage;
    }
    Run run(cfg, out);
    return commands.at(cfg.command)(run);
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace qsfp::cli
