#include "qsfp/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "qsfp/io.hpp"

namespace qsfp {
namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

Json to_json(const CauchyParams& p) { return {{"m", p.m}, {"sigma", p.sigma}}; }

Json to_json(const Complex& z) {
  return {{"re", number_or_null(z.real())}, {"im", number_or_null(z.imag())}};
}

Json to_json(const FixedPointReport& r) {
  return {{"iterations", r.iterations},   {"sample_size", r.sample_size},
          {"residual_ks", r.residual_ks}, {"residual_cf", r.residual_cf},
          {"mean", r.mean},               {"variance", r.variance},
          {"trimmed_ks", r.trimmed_ks},   {"provenance", r.provenance}};
}

Json to_json(const Theorem1Report& r) {
  return {{"params", to_json(r.params)},
          {"residuals", to_json(r.residuals)},
          {"cf_route_residual", r.cf_route_residual},
          {"tolerance", r.tolerance},
          {"passed", r.passed}};
}

Json to_json(const Corollary2Report& r) {
  return {{"ks_mu_vs_independent", r.ks_mu_vs_independent},
          {"ks_mu_vs_costs", r.ks_mu_vs_costs},
          {"ks_mu_vs_convolved", r.ks_mu_vs_convolved},
          {"noise_level", r.noise_level},
          {"tolerance", r.tolerance},
          {"passed", r.passed}};
}

Json to_json(const SlopeFit& f) {
  return {{"window", f.window},
          {"beta", to_json(f.beta)},
          {"gamma", to_json(f.gamma)},
          {"fit_residual", f.fit_residual},
          {"points", f.points}};
}

Json to_json(const SlopeEstimate& s) {
  Json sens = Json::array();
  for (const auto& f : s.sensitivity) sens.push_back(to_json(f));
  return {{"beta_re", s.beta_re},
          {"beta_im", s.beta_im},
          {"m", s.m()},
          {"sigma", s.sigma()},
          {"gamma", to_json(s.gamma)},
          {"fit_residual", s.fit_residual},
          {"expansion_ok", s.expansion_ok},
          {"J", to_json(s.J)},
          {"c", to_json(s.c)},
          {"c_dispersion", s.c_dispersion},
          {"consistency", s.consistency},
          {"sensitivity", sens}};
}

Json to_json(const JEstimate& j) {
  return {{"J", to_json(j.J)},
          {"small_v_correction", to_json(j.small_v_correction)},
          {"decay_exponent", j.decay_exponent},
          {"refinement_delta", number_or_null(j.refinement_delta)},
          {"noise", j.noise}};
}

Json to_json(const ChernoffReport& r) {
  return {{"n", r.bound.n},
          {"x", r.bound.x},
          {"bound", r.bound.value},
          {"vacuous", r.bound.vacuous},
          {"outside_validity", r.bound.outside_validity},
          {"reps", r.reps},
          {"hits", r.hits},
          {"frequency", r.frequency},
          {"slack", r.slack},
          {"passed", r.passed}};
}

Json to_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
}

Json to_json(const AttractionReport& r) {
  Json w = Json::array(), l = Json::array();
  for (const auto& s : r.w_stats) w.push_back(to_json(s));
  for (const auto& s : r.l_n_stats) l.push_back(to_json(s));
  Json j = {{"source", r.source},
            {"target", to_json(r.target)},
            {"target_estimated", r.target_estimated},
            {"reps", r.reps},
            {"noise_level", r.noise_level},
            {"familywise_noise_level", r.familywise_noise_level},
            {"ks_nonincreasing", r.ks_nonincreasing()},
            {"ks_by_stage", array(r.ks_by_stage)},
            {"levy_by_stage", array(r.levy_by_stage)},
            {"w_stats", w},
            {"l_n_stats", l}};
  if (r.target_fit) j["target_fit"] = to_json(*r.target_fit);
  return j;
}

Json to_json(const CouplingReport& r) {
  return {{"target", to_json(r.target)},
          {"target_beta", to_json(r.target_beta)},
          {"degenerate_target", r.degenerate_target},
          {"sample_size", r.sample_size},
          {"noise_level", r.noise_level},
          {"max_marginal_ks", r.max_marginal_ks()},
          {"difference_decreasing", r.difference_decreasing()},
          {"marginal1_ks", array(r.marginal1_ks)},
          {"marginal2_ks", array(r.marginal2_ks)},
          {"difference_ks", array(r.difference_ks)},
          {"difference_levy", array(r.difference_levy)},
          {"difference_distance", array(r.difference_distance)},
          {"difference_sd", array(r.difference_sd)}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_attraction_csv(const std::filesystem::path& path, const AttractionReport& r) {
  auto out = open_for_write(path);
  out << "level,ks,levy,w_mean,w_sd,l_n_mean,l_n_max\n";
  for (std::size_t k = 0; k < r.ks_by_stage.size(); ++k) {
    out << k << ',' << format_double(r.ks_by_stage[k]) << ','
        << format_double(r.levy_by_stage[k]) << ',' << format_double(r.w_stats[k].mean) << ','
        << format_double(r.w_stats[k].sd) << ',' << format_double(r.l_n_stats[k].mean) << ','
        << format_double(r.l_n_stats[k].max) << '\n';
  }
}

void write_l_n_histogram_csv(const std::filesystem::path& path, const AttractionReport& r,
                             std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("write_l_n_histogram_csv: bins = 0");
  auto out = open_for_write(path);
  out << "level,bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < r.l_n_draws.size(); ++k) {
    // L_n in (0, 1], fixed bins.
    std::vector<std::size_t> counts(bins, 0);
    for (double v : r.l_n_draws[k]) {
      auto b = static_cast<std::size_t>(v * static_cast<double>(bins));
      counts[std::min(b, bins - 1)]++;
    }
    for (std::size_t b = 0; b < bins; ++b) {
      out << k << ',' << format_double(static_cast<double>(b) / bins) << ','
          << format_double(static_cast<double>(b + 1) / bins) << ',' << counts[b] << '\n';
    }
  }
}

}  // namespace qsfp
