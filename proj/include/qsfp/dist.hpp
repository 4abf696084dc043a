#pragma once

#include <complex>
#include <limits>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qsfp/rng.hpp"

namespace qsfp {

using Complex = std::complex<double>;

/// A finite sample standing in for a probability law on the real line.
/// Values are kept sorted ascending; the empirical CDF is the
/// right-continuous step function with mass 1/n per point.
class EmpiricalDist {
 public:
  /// Sorts `values`. Throws std::invalid_argument if empty or non-finite.
  explicit EmpiricalDist(std::vector<double> values, std::string provenance = {});

  /// n copies of c.
  static EmpiricalDist point_mass(double c, std::size_t n = 1);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::string& provenance() const { return provenance_; }

  double mean() const;
  /// Unbiased sample variance (0 for a single point).
  double variance() const;
  double stddev() const;

  /// F(x) = #{X_i <= x} / n.
  double cdf(double x) const;
  /// F(x-) = #{X_i < x} / n.
  double cdf_left(double x) const;
  /// Linear interpolation between order statistics; q in [0, 1].
  double quantile(double q) const;

  /// One draw with replacement.
  double resample(RngStream& rng) const { return values_[rng.index(values_.size())]; }
  EmpiricalDist resampled(RngStream& rng, std::size_t out) const;

  /// Same sample shifted by -mean().
  EmpiricalDist centered() const;

 private:
  std::vector<double> values_;
  std::string provenance_;
};

/// Complex values on a grid of nonnegative t (no normalization invariant).
/// Used for the derived views r(t), b(t) and friends.
struct GridFunction {
  std::vector<double> ts;
  std::vector<Complex> values;

  std::size_t size() const { return ts.size(); }
};

/// A characteristic function sampled on 0 = t_0 < t_1 < ... .
/// psi(0) is exactly 1; negative t follow from psi(-t) = conj(psi(t)).
class CfGrid {
 public:
  /// Throws std::invalid_argument on a malformed grid or |psi(0) - 1| > 1e-9.
  CfGrid(std::vector<double> ts, std::vector<Complex> psi);

  std::span<const double> ts() const { return ts_; }
  std::span<const Complex> psi() const { return psi_; }
  std::size_t size() const { return ts_.size(); }
  double t(std::size_t i) const { return ts_[i]; }
  Complex operator[](std::size_t i) const { return psi_[i]; }

  double max_modulus() const;
  bool within_unit_disk(double tol) const { return max_modulus() <= 1.0 + tol; }

  /// Grid restricted to t <= t_hi (keeps t = 0).
  CfGrid truncated(double t_hi) const;
  /// Every `stride`-th point, always keeping t = 0 and the last point.
  CfGrid thinned(std::size_t stride) const;
  /// Pointwise product with another CF on the same grid.
  CfGrid times(const CfGrid& other) const;

 private:
  std::vector<double> ts_;
  std::vector<Complex> psi_;
};

struct CauchyParams {
  double m = 0.0;
  double sigma = 0.0;

  /// Throws std::invalid_argument if sigma < 0 or either value is not finite.
  void validate() const;
};

struct GridSpec {
  double t_min = 1e-3;
  double t_max = 10.0;
  std::size_t points = 200;
};

/// {0} followed by `points` geometrically spaced values in [t_min, t_max].
std::vector<double> make_grid(const GridSpec& spec = {});
/// Throws unless ts[0] == 0 and ts is strictly increasing.
void validate_grid(std::span<const double> ts);

/// Default CF tolerance 5 / sqrt(n) for estimators built from n samples.
double cf_tolerance(std::size_t n);

CfGrid cauchy_cf(const CauchyParams& p, std::span<const double> ts);
EmpiricalDist cauchy_sample(const CauchyParams& p, std::size_t n, RngStream& rng);

/// Sample average of exp(i t X) at every grid point; exactly 1 at t = 0.
CfGrid empirical_cf(const EmpiricalDist& d, std::span<const double> ts);

/// sup_x |F_a(x) - F_b(x)|.
double ks_distance(const EmpiricalDist& a, const EmpiricalDist& b);
/// KS supremum restricted to the central (1 - 2 trim) mass of both samples.
double trimmed_ks_distance(const EmpiricalDist& a, const EmpiricalDist& b,
                           double trim = 0.01);
/// Levy distance; metrizes weak convergence, including toward point masses.
double levy_distance(const EmpiricalDist& a, const EmpiricalDist& b);
/// Two-sample KS critical value c(alpha) sqrt((n1 + n2) / (n1 n2)).
double ks_noise_level(std::size_t n1, std::size_t n2, double alpha = 1e-3);

/// max_t |a(t) - b(t)| over points with t <= t_hi. Grids must match.
double cf_sup_distance(const CfGrid& a, const CfGrid& b,
                       double t_hi = std::numeric_limits<double>::infinity());

/// `out` independent draws X + Y, X resampled from a and Y from b.
EmpiricalDist convolve(const EmpiricalDist& a, const EmpiricalDist& b, RngStream& rng,
                       std::size_t out);

}  // namespace qsfp
