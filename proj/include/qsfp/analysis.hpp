#pragma once

#include <vector>

#include "qsfp/dist.hpp"
#include "qsfp/quadrature.hpp"

namespace qsfp {

/// r(t) = psi(t) - 1; r(0) = 0.
GridFunction r_grid(const CfGrid& psi);

/// Per-t quadratures behind the integral-equation view of a CF:
///   product(t) = int_0^1 r(ut) r((1-u)t) du
///   drift(t)   = int_0^1 [psi(ut) psi((1-u)t) - 1] g(u) du
///   a(t)       = int_0^1 psi(ut) psi((1-u)t) [e^{itg(u)} - 1 - itg(u)] du
///   mean_r(t)  = int_0^1 r(ut) du
///   b(t)       = product(t) + i t drift(t) + a(t)
struct BTerms {
  std::vector<double> ts;
  std::vector<Complex> product, drift, a, mean_r, b;

  GridFunction b_function() const { return {ts, b}; }
};

BTerms b_terms(const CfGrid& psi, const QuadratureConfig& quad = {});
GridFunction b_grid(const CfGrid& psi, const QuadratureConfig& quad = {});

/// (7/6 - pi^2/9) t^2, the bound on |a(t)|.
double a_bound(double t);

struct IntegralEquationReport {
  double max_residual = 0.0;
  /// r(t) - 2 int_0^1 r(ut) du - b(t) per grid point.
  GridFunction residual;
};

IntegralEquationReport integral_equation_residual(const CfGrid& psi,
                                                  const QuadratureConfig& quad = {});

struct ConstantProfile {
  /// c(t) = r(t)/t + 2 int_t^1 b(v)/v^2 dv - b(t)/t for grid t > 0.
  GridFunction c_of_t;
  Complex c;          ///< componentwise median of c(t)
  double dispersion;  ///< |IQR(Re c) + i IQR(Im c)|
};

/// Throws std::invalid_argument if the grid does not reach t = 1 or is too
/// coarse (ratio between consecutive points above 1.25, or fewer than 20
/// points in (0, 1]).
ConstantProfile solution_constant_c(const CfGrid& psi, const QuadratureConfig& quad = {});

struct JEstimate {
  Complex J;
  Complex small_v_correction;  ///< fitted contribution of [0, t_1]
  double decay_exponent;       ///< p in |b(v)| ~ v^p near 0
  double refinement_delta;     ///< |J - J on every other grid point|
  double noise;                ///< propagated sampling noise, 0 if sample size unknown
};

/// J = int_0^1 b(v)/v^2 dv. The integral over [t_1, 1] uses v = w^3, which
/// turns the v^{-2/3} behaviour into a bounded integrand; [0, t_1] is closed
/// with the power law fitted to b. Throws std::domain_error when b decays no
/// faster than v (non-integrable b/v^2).
JEstimate estimate_J(const CfGrid& psi, const QuadratureConfig& quad = {},
                     std::size_t sample_size = 0);

struct SlopeFit {
  double window = 0.0;
  Complex beta;
  Complex gamma;
  double fit_residual = 0.0;
  std::size_t points = 0;
};

struct SlopeOptions {
  double t_fit = 0.3;
  std::vector<double> sensitivity_windows{0.1, 0.3, 0.5};
  double residual_threshold = 0.2;
};

struct SlopeEstimate {
  double beta_re = 0.0;  ///< -sigma
  double beta_im = 0.0;  ///< m
  Complex gamma;
  double fit_residual = 0.0;
  bool expansion_ok = false;
  std::vector<SlopeFit> sensitivity;

  // Filled by analyze_slope.
  Complex J;
  Complex c;
  double c_dispersion = 0.0;
  double consistency = 0.0;  ///< |beta - (c - 2J)|

  Complex beta() const { return {beta_re, beta_im}; }
  double m() const { return beta_im; }
  double sigma() const { return -beta_re; }
  CauchyParams cauchy() const { return {beta_im, std::max(0.0, -beta_re)}; }
};

/// Weighted least squares r(t) = beta t + gamma t^2 on [t_1, t_fit] with
/// weights 1/t. Throws std::invalid_argument with fewer than three points
/// in the window.
SlopeFit fit_slope(const CfGrid& psi, double t_fit);
SlopeEstimate estimate_beta(const CfGrid& psi, const SlopeOptions& opts = {});

/// estimate_beta plus c, J and the consistency |beta - (c - 2J)|.
SlopeEstimate analyze_slope(const CfGrid& psi, const QuadratureConfig& quad = {},
                            const SlopeOptions& opts = {});

struct EnvelopeReport {
  double c_hat = 0.0;
  std::vector<double> ts;
  std::vector<double> ratio;  ///< M(t) / t^{2/3}, 0 at t = 0
};

/// M(t) = max_{s <= t on the grid} |r(s)|; c_hat = max M(t) / t^{2/3}.
EnvelopeReport envelope_check(const CfGrid& psi);

}  // namespace qsfp
