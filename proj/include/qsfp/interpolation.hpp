#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qsfp {

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson (monotone)
/// slopes. C1, and preserves monotonicity of the data on every interval.
class Pchip {
 public:
  Pchip(std::span<const double> xs, std::span<const double> ys);

  /// Evaluates at x in [front, back]; x slightly outside (relative 1e-12)
  /// is clamped, anything further throws std::out_of_range.
  double operator()(double x) const;

  /// Exact integral of the interpolant over [a, b] (a > b gives the negative).
  double integral(double a, double b) const;

  std::span<const double> knots() const { return xs_; }
  std::span<const double> slopes() const { return ds_; }

 private:
  std::size_t segment(double x) const;
  double antiderivative(double x) const;

  std::vector<double> xs_, ys_, ds_, cumulative_;
};

/// Real and imaginary parts interpolated separately.
class ComplexPchip {
 public:
  ComplexPchip(std::span<const double> xs, std::span<const std::complex<double>> zs);

  std::complex<double> operator()(double x) const { return {re_(x), im_(x)}; }
  std::complex<double> integral(double a, double b) const {
    return {re_.integral(a, b), im_.integral(a, b)};
  }

 private:
  static std::vector<double> part(std::span<const std::complex<double>> zs, bool imag);

  Pchip re_, im_;
};

}  // namespace qsfp
