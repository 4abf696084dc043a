#include "qsfp/fixed_point.hpp"

#include <stdexcept>

#include "qsfp/parallel.hpp"
#include "qsfp/quicksort.hpp"
#include "qsfp/transform.hpp"

namespace qsfp {

EmpiricalDist approximate_mu(std::size_t iterations, std::size_t sample_size, RngStream& rng) {
  if (iterations == 0) throw std::invalid_argument("approximate_mu: iterations = 0");
  if (sample_size < 1000) throw std::invalid_argument("approximate_mu: sample_size < 1000");
  RngStream base = rng.fork();
  EmpiricalDist d = EmpiricalDist::point_mass(0.0);
  for (std::size_t k = 0; k < iterations; ++k) {
    RngStream stage = base.substream(k);
    d = apply_T(k == 0 ? d : d.centered(), stage, sample_size);
  }
  return EmpiricalDist({d.values().begin(), d.values().end()},
                       "approximate_mu(" + base.describe() + ", " + std::to_string(iterations) +
                           " iterations)");
}

FixedPointReport residual(const EmpiricalDist& d, RngStream& rng, std::span<const double> ts,
                          bool trimmed) {
  RngStream base = rng.fork();
  RngStream s_t = base.substream(0), s_r = base.substream(1);
  const std::size_t n = d.size();
  const EmpiricalDist td = apply_T(d, s_t, n);
  const EmpiricalDist fresh = d.resampled(s_r, n);
  FixedPointReport rep;
  rep.sample_size = n;
  rep.trimmed_ks = trimmed;
  rep.residual_ks = trimmed ? trimmed_ks_distance(td, fresh) : ks_distance(td, fresh);
  rep.residual_cf = cf_sup_distance(empirical_cf(td, ts), empirical_cf(fresh, ts));
  rep.mean = d.mean();
  rep.variance = d.variance();
  rep.provenance = base.describe();
  return rep;
}

FixedPointReport residual(const EmpiricalDist& d, RngStream& rng) {
  return residual(d, rng, make_grid());
}

std::vector<FixedPointReport> contraction_profile(std::size_t iterations,
                                                  std::size_t sample_size, RngStream& rng,
                                                  const GridSpec& grid) {
  const auto ts = make_grid(grid);
  RngStream base = rng.fork();
  std::vector<FixedPointReport> out;
  EmpiricalDist d = EmpiricalDist::point_mass(0.0, sample_size);
  for (std::size_t k = 0; k <= iterations; ++k) {
    if (k > 0) {
      RngStream stage = base.substream(2 * k);
      d = apply_T(k == 1 ? d : d.centered(), stage, sample_size);
    }
    RngStream probe = base.substream(2 * k + 1);
    FixedPointReport rep = residual(d, probe, ts);
    rep.iterations = k;
    out.push_back(rep);
  }
  return out;
}

Theorem1Report verify_theorem1(const CauchyParams& params, const EmpiricalDist& mu_hat,
                               RngStream& rng, const Theorem1Options& opts) {
  params.validate();
  RngStream base = rng.fork();
  RngStream s_c = base.substream(0), s_v = base.substream(1), s_r = base.substream(2);
  const std::size_t n = opts.sample_size ? opts.sample_size : mu_hat.size();
  const EmpiricalDist nu = convolve(mu_hat, cauchy_sample(params, n, s_c), s_v, n);
  const auto ts = make_grid(opts.grid);

  Theorem1Report rep;
  rep.params = params;
  rep.tolerance = opts.tolerance;
  rep.residuals = residual(nu, s_r, ts, params.sigma > 0.0);
  rep.residuals.iterations = 1;
  const CfGrid psi = empirical_cf(nu, ts);
  rep.cf_route_residual = cf_sup_distance(apply_T_cf(psi, opts.quad), psi, opts.t_check);
  rep.passed = rep.cf_route_residual <= opts.tolerance;
  rep.psi = psi;
  return rep;
}

std::vector<CauchyParams> theorem1_cells() {
  std::vector<CauchyParams> cells;
  for (double m : {-2.0, 0.0, 1.0}) {
    for (double s : {0.0, 0.5, 1.0}) cells.push_back({m, s});
  }
  return cells;
}

std::vector<Theorem1Report> sweep_theorem1(const std::vector<CauchyParams>& cells,
                                           const EmpiricalDist& mu_hat, RngStream& rng,
                                           const Theorem1Options& opts) {
  RngStream base = rng.fork();
  std::vector<Theorem1Report> out;
  out.reserve(cells.size());
  // Each cell already runs its inner loops on the pool.
  for (std::size_t i = 0; i < cells.size(); ++i) {
    RngStream cell = base.substream(i);
    out.push_back(verify_theorem1(cells[i], mu_hat, cell, opts));
  }
  return out;
}

Corollary2Report verify_corollary2(const EmpiricalDist& mu_hat, RngStream& rng,
                                   const Corollary2Options& opts) {
  RngStream base = rng.fork();
  RngStream s_mu = base.substream(0), s_qs = base.substream(1), s_c = base.substream(2),
            s_v = base.substream(3);
  const EmpiricalDist mu2 = approximate_mu(opts.iterations, opts.sample_size, s_mu);
  const EmpiricalDist costs = normalized_costs(opts.quicksort_n, opts.quicksort_reps, s_qs);
  const std::size_t n = mu_hat.size();
  const EmpiricalDist conv = convolve(mu_hat, cauchy_sample({0.0, 0.5}, n, s_c), s_v, n);

  Corollary2Report rep;
  rep.tolerance = opts.tolerance;
  rep.ks_mu_vs_independent = ks_distance(mu_hat, mu2);
  rep.ks_mu_vs_costs = ks_distance(mu_hat, costs);
  rep.ks_mu_vs_convolved = ks_distance(mu_hat, conv);
  rep.noise_level = ks_noise_level(mu_hat.size(), mu2.size());
  rep.passed = rep.ks_mu_vs_independent <= rep.noise_level &&
               rep.ks_mu_vs_costs <= opts.tolerance &&
               rep.ks_mu_vs_convolved > opts.tolerance;
  return rep;
}

Corollary2Report verify_corollary2(RngStream& rng, const Corollary2Options& opts) {
  RngStream base = rng.fork();
  RngStream s_mu = base.substream(0), s_rest = base.substream(1);
  const EmpiricalDist mu_hat = approximate_mu(opts.iterations, opts.sample_size, s_mu);
  return verify_corollary2(mu_hat, s_rest, opts);
}

}  // namespace qsfp
