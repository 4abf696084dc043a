#include "qsfp/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsfp {
namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

double end_slope(double h0, double h1, double del0, double del1) {
  double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
  if (sign(d) != sign(del0)) {
    d = 0.0;
  } else if (sign(del0) != sign(del1) && std::abs(d) > std::abs(3.0 * del0)) {
    d = 3.0 * del0;
  }
  return d;
}

// Integral over [0, s] (in units of the segment width) of the Hermite basis.
double hermite_partial(double s, double y0, double y1, double hd0, double hd1) {
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  return y0 * (0.5 * s4 - s3 + s) + hd0 * (0.25 * s4 - (2.0 / 3.0) * s3 + 0.5 * s2) +
         y1 * (-0.5 * s4 + s3) + hd1 * (0.25 * s4 - s3 / 3.0);
}

}  // namespace

Pchip::Pchip(std::span<const double> xs, std::span<const double> ys)
    : xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end()) {
  const std::size_t n = xs_.size();
  if (n < 2 || ys_.size() != n) throw std::invalid_argument("Pchip: need >= 2 matching points");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw std::invalid_argument("Pchip: knots must increase");
  }
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = xs_[k + 1] - xs_[k];
    del[k] = (ys_[k + 1] - ys_[k]) / h[k];
  }
  ds_.assign(n, 0.0);
  if (n == 2) {
    ds_[0] = ds_[1] = del[0];
  } else {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (del[k - 1] * del[k] > 0.0) {
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        ds_[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
      }
    }
    ds_[0] = end_slope(h[0], h[1], del[0], del[1]);
    ds_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  }
  cumulative_.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    cumulative_[k + 1] =
        cumulative_[k] + h[k] * hermite_partial(1.0, ys_[k], ys_[k + 1], h[k] * ds_[k], h[k] * ds_[k + 1]);
  }
}

std::size_t Pchip::segment(double x) const {
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  if (it == xs_.begin()) return 0;
  const auto k = static_cast<std::size_t>(it - xs_.begin()) - 1;
  return std::min(k, xs_.size() - 2);
}

double Pchip::operator()(double x) const {
  const double lo = xs_.front(), hi = xs_.back();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (x < lo - slack || x > hi + slack) throw std::out_of_range("Pchip: x outside knot range");
  x = std::clamp(x, lo, hi);
  const std::size_t k = segment(x);
  const double h = xs_[k + 1] - xs_[k];
  const double s = (x - xs_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return ys_[k] * (2.0 * s3 - 3.0 * s2 + 1.0) + h * ds_[k] * (s3 - 2.0 * s2 + s) +
         ys_[k + 1] * (-2.0 * s3 + 3.0 * s2) + h * ds_[k + 1] * (s3 - s2);
}

double Pchip::antiderivative(double x) const {
  const double lo = xs_.front(), hi = xs_.back();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (x < lo - slack || x > hi + slack) throw std::out_of_range("Pchip: x outside knot range");
  x = std::clamp(x, lo, hi);
  const std::size_t k = segment(x);
  const double h = xs_[k + 1] - xs_[k];
  const double s = (x - xs_[k]) / h;
  return cumulative_[k] + h * hermite_partial(s, ys_[k], ys_[k + 1], h * ds_[k], h * ds_[k + 1]);
}

double Pchip::integral(double a, double b) const { return antiderivative(b) - antiderivative(a); }

std::vector<double> ComplexPchip::part(std::span<const std::complex<double>> zs, bool imag) {
  std::vector<double> out(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) out[i] = imag ? zs[i].imag() : zs[i].real();
  return out;
}

ComplexPchip::ComplexPchip(std::span<const double> xs, std::span<const std::complex<double>> zs)
    : re_(xs, part(zs, false)), im_(xs, part(zs, true)) {}

}  // namespace qsfp
