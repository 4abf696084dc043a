#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsfp/analysis.hpp"
#include "qsfp/dist.hpp"
#include "qsfp/quadrature.hpp"
#include "qsfp/rng.hpp"

namespace qsfp {

struct FixedPointReport {
  std::size_t iterations = 0;
  std::size_t sample_size = 0;
  double residual_ks = 0.0;
  double residual_cf = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  bool trimmed_ks = false;  ///< residual_ks is the central-98% variant
  std::string provenance;
};

/// T iterated from the point mass at 0, each stage resampled to
/// `sample_size`. The input of every step is shifted to sample mean 0, so the
/// mean cannot random-walk across stages. Throws for iterations == 0 or
/// sample_size < 1000.
EmpiricalDist approximate_mu(std::size_t iterations, std::size_t sample_size, RngStream& rng);

/// residual_ks = KS(T d, fresh resample of d); residual_cf is the sup-distance
/// of their empirical CFs on `ts`. With `trimmed` the KS uses the central 98%.
FixedPointReport residual(const EmpiricalDist& d, RngStream& rng,
                          std::span<const double> ts, bool trimmed = false);
FixedPointReport residual(const EmpiricalDist& d, RngStream& rng);

/// Residuals along the T-trajectory from delta_0; entry k describes stage k
/// (k = 0 is delta_0 itself). Stages are built as in approximate_mu.
std::vector<FixedPointReport> contraction_profile(std::size_t iterations,
                                                  std::size_t sample_size, RngStream& rng,
                                                  const GridSpec& grid = {});

struct Theorem1Options {
  std::size_t sample_size = 0;  ///< 0: size of mu_hat
  double t_check = 5.0;
  double tolerance = 0.02;
  GridSpec grid{};
  QuadratureConfig quad{};
};

struct Theorem1Report {
  CauchyParams params;
  FixedPointReport residuals;
  /// sup_{t <= t_check} |apply_T_cf(psi_hat) - psi_hat|, the primary check.
  double cf_route_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Empirical CF of mu_hat * Cauchy(params) on the options grid.
  std::optional<CfGrid> psi;
};

/// Residuals of mu_hat * Cauchy(params) under T.
Theorem1Report verify_theorem1(const CauchyParams& params, const EmpiricalDist& mu_hat,
                               RngStream& rng, const Theorem1Options& opts = {});

/// verify_theorem1 over a parameter grid; one derived stream per cell.
std::vector<Theorem1Report> sweep_theorem1(const std::vector<CauchyParams>& cells,
                                           const EmpiricalDist& mu_hat, RngStream& rng,
                                           const Theorem1Options& opts = {});

/// The nine cells {-2, 0, 1} x {0, 0.5, 1}.
std::vector<CauchyParams> theorem1_cells();

struct Corollary2Options {
  std::size_t iterations = 30;
  std::size_t sample_size = 1'000'000;
  std::size_t quicksort_n = 10'000;
  std::size_t quicksort_reps = 100'000;
  double tolerance = 0.02;
};

struct Corollary2Report {
  double ks_mu_vs_independent = 0.0;  ///< two independent constructions
  double ks_mu_vs_costs = 0.0;        ///< against normalized Quicksort costs
  double ks_mu_vs_convolved = 0.0;    ///< against mu_hat * Cauchy(0, 0.5)
  double noise_level = 0.0;           ///< KS critical value for the two-mu comparison
  double tolerance = 0.0;
  bool passed = false;
};

Corollary2Report verify_corollary2(RngStream& rng, const Corollary2Options& opts = {});
/// Same, reusing an existing mu_hat as the first construction.
Corollary2Report verify_corollary2(const EmpiricalDist& mu_hat, RngStream& rng,
                                   const Corollary2Options& opts = {});

}  // namespace qsfp
