#include "qsfp/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qsfp/parallel.hpp"

namespace qsfp {

EmpiricalDist::EmpiricalDist(std::vector<double> values, std::string provenance)
    : values_(std::move(values)), provenance_(std::move(provenance)) {
  if (values_.empty()) throw std::invalid_argument("EmpiricalDist: empty sample");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("EmpiricalDist: non-finite value");
  }
  std::sort(values_.begin(), values_.end());
}

EmpiricalDist EmpiricalDist::point_mass(double c, std::size_t n) {
  if (n == 0) throw std::invalid_argument("EmpiricalDist::point_mass: n = 0");
  return EmpiricalDist(std::vector<double>(n, c), "point_mass");
}

double EmpiricalDist::mean() const {
  double sum = 0.0, comp = 0.0;
  for (double v : values_) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(values_.size());
}

double EmpiricalDist::variance() const {
  const std::size_t n = values_.size();
  if (n < 2) return 0.0;
  const double mu = mean();
  double ss = 0.0, s = 0.0;
  for (double v : values_) {
    const double d = v - mu;
    ss += d * d;
    s += d;
  }
  const double nn = static_cast<double>(n);
  return (ss - s * s / nn) / (nn - 1.0);
}

double EmpiricalDist::stddev() const { return std::sqrt(variance()); }

double EmpiricalDist::cdf(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDist::cdf_left(double x) const {
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDist::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  const double pos = q * static_cast<double>(values_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= values_.size()) return values_.back();
  const double frac = pos - static_cast<double>(lo);
  return values_[lo] + frac * (values_[lo + 1] - values_[lo]);
}

EmpiricalDist EmpiricalDist::resampled(RngStream& rng, std::size_t out) const {
  if (out == 0) throw std::invalid_argument("resampled: out = 0");
  RngStream base = rng.fork();
  std::vector<double> v(out);
  parallel_chunks(out, [&](std::size_t c, std::size_t begin, std::size_t end) {
    RngStream s = base.substream(c);
    for (std::size_t i = begin; i < end; ++i) v[i] = resample(s);
  });
  return EmpiricalDist(std::move(v), "resample(" + base.describe() + ")");
}

EmpiricalDist EmpiricalDist::centered() const {
  const double mu = mean();
  std::vector<double> v(values_);
  for (double& x : v) x -= mu;
  return EmpiricalDist(std::move(v), provenance_ + "+centered");
}

CfGrid::CfGrid(std::vector<double> ts, std::vector<Complex> psi)
    : ts_(std::move(ts)), psi_(std::move(psi)) {
  validate_grid(ts_);
  if (psi_.size() != ts_.size()) throw std::invalid_argument("CfGrid: size mismatch");
  if (std::abs(psi_[0] - Complex(1.0, 0.0)) > 1e-9) {
    throw std::invalid_argument("CfGrid: psi(0) must equal 1");
  }
  psi_[0] = Complex(1.0, 0.0);
  for (const auto& z : psi_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("CfGrid: non-finite value");
    }
  }
}

double CfGrid::max_modulus() const {
  double m = 0.0;
  for (const auto& z : psi_) m = std::max(m, std::abs(z));
  return m;
}

CfGrid CfGrid::truncated(double t_hi) const {
  std::vector<double> t;
  std::vector<Complex> p;
  for (std::size_t i = 0; i < ts_.size() && ts_[i] <= t_hi; ++i) {
    t.push_back(ts_[i]);
    p.push_back(psi_[i]);
  }
  return CfGrid(std::move(t), std::move(p));
}

CfGrid CfGrid::thinned(std::size_t stride) const {
  if (stride == 0) throw std::invalid_argument("CfGrid::thinned: stride = 0");
  std::vector<double> t;
  std::vector<Complex> p;
  for (std::size_t i = 0; i < ts_.size(); i += stride) {
    t.push_back(ts_[i]);
    p.push_back(psi_[i]);
  }
  if (t.back() != ts_.back()) {
    t.push_back(ts_.back());
    p.push_back(psi_.back());
  }
  return CfGrid(std::move(t), std::move(p));
}

CfGrid CfGrid::times(const CfGrid& other) const {
  if (other.ts_ != ts_) throw std::invalid_argument("CfGrid::times: grids differ");
  std::vector<Complex> p(psi_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = psi_[i] * other.psi_[i];
  return CfGrid(ts_, std::move(p));
}

void CauchyParams::validate() const {
  if (!std::isfinite(m) || !std::isfinite(sigma)) {
    throw std::invalid_argument("CauchyParams: non-finite parameter");
  }
  if (sigma < 0.0) throw std::invalid_argument("CauchyParams: sigma < 0");
}

std::vector<double> make_grid(const GridSpec& spec) {
  if (!(spec.t_min > 0.0) || !(spec.t_max > spec.t_min) || spec.points < 2) {
    throw std::invalid_argument("make_grid: need 0 < t_min < t_max and points >= 2");
  }
  std::vector<double> ts;
  ts.reserve(spec.points + 1);
  ts.push_back(0.0);
  const double log_lo = std::log(spec.t_min);
  const double step = (std::log(spec.t_max) - log_lo) / static_cast<double>(spec.points - 1);
  for (std::size_t k = 0; k < spec.points; ++k) {
    ts.push_back(std::exp(log_lo + step * static_cast<double>(k)));
  }
  ts[1] = spec.t_min;
  ts.back() = spec.t_max;
  return ts;
}

void validate_grid(std::span<const double> ts) {
  if (ts.empty() || ts[0] != 0.0) throw std::invalid_argument("grid must start at t = 0");
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1]) || !std::isfinite(ts[i])) {
      throw std::invalid_argument("grid must be strictly increasing and finite");
    }
  }
}

double cf_tolerance(std::size_t n) { return 5.0 / std::sqrt(static_cast<double>(n)); }

CfGrid cauchy_cf(const CauchyParams& p, std::span<const double> ts) {
  p.validate();
  validate_grid(ts);
  std::vector<Complex> psi(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    psi[i] = std::exp(Complex(-p.sigma * ts[i], p.m * ts[i]));
  }
  psi[0] = 1.0;
  return CfGrid({ts.begin(), ts.end()}, std::move(psi));
}

EmpiricalDist cauchy_sample(const CauchyParams& p, std::size_t n, RngStream& rng) {
  p.validate();
  if (n == 0) throw std::invalid_argument("cauchy_sample: n = 0");
  RngStream base = rng.fork();
  std::vector<double> v(n);
  parallel_chunks(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    RngStream s = base.substream(c);
    for (std::size_t i = begin; i < end; ++i) {
      v[i] = p.m + p.sigma * std::tan(std::numbers::pi * (s.uniform_open() - 0.5));
    }
  });
  return EmpiricalDist(std::move(v), "cauchy(" + base.describe() + ")");
}

namespace {

// Empirical CF by binned moment expansion. Samples are grouped into bins of
// width h around centers c_b; with delta = x - c_b and |t delta| <= 1/4 on the
// whole grid, exp(i t x) = exp(i t c_b) * sum_k (i t delta)^k / k! truncated at
// kOrder has error below 1e-20 per sample. Bins holding one sample and samples
// too large for an accurate center are summed directly.
constexpr int kOrder = 14;
constexpr double kDirectMagnitude = 1e7;

struct BinnedSample {
  std::vector<double> centers;
  std::vector<double> moments;  // (kOrder + 1) per bin
  std::vector<double> direct;
};

BinnedSample bin_sample(std::span<const double> values, double h) {
  BinnedSample out;
  std::size_t i = 0;
  const std::size_t n = values.size();
  while (i < n) {
    const double x = values[i];
    if (std::abs(x) > kDirectMagnitude) {
      out.direct.push_back(x);
      ++i;
      continue;
    }
    const double b = std::floor(x / h);
    std::size_t j = i + 1;
    while (j < n && std::abs(values[j]) <= kDirectMagnitude && std::floor(values[j] / h) == b) ++j;
    if (j - i == 1) {
      out.direct.push_back(x);
    } else {
      const double center = (b + 0.5) * h;
      out.centers.push_back(center);
      const std::size_t base = out.moments.size();
      out.moments.resize(base + kOrder + 1, 0.0);
      double* m = out.moments.data() + base;
      for (std::size_t k = i; k < j; ++k) {
        const double delta = values[k] - center;
        double p = 1.0;
        for (int q = 0; q <= kOrder; ++q) {
          m[q] += p;
          p *= delta;
        }
      }
    }
    i = j;
  }
  return out;
}

}  // namespace

CfGrid empirical_cf(const EmpiricalDist& d, std::span<const double> ts) {
  validate_grid(ts);
  std::vector<Complex> psi(ts.size(), Complex(1.0, 0.0));
  const double t_max = ts.back();
  if (t_max == 0.0) return CfGrid({ts.begin(), ts.end()}, std::move(psi));
  const double h = 0.5 / t_max;
  const BinnedSample bins = bin_sample(d.values(), h);
  const double inv_n = 1.0 / static_cast<double>(d.size());
  const std::size_t nbins = bins.centers.size();

  parallel_for(ts.size() - 1, [&](std::size_t job) {
    const std::size_t idx = job + 1;
    const double t = ts[idx];
    // Real/imaginary parts of (i t)^k / k!.
    double coef_re[kOrder + 1];
    double coef_im[kOrder + 1];
    double mag = 1.0;
    for (int k = 0; k <= kOrder; ++k) {
      if (k > 0) mag *= t / k;
      switch (k % 4) {
        case 0: coef_re[k] = mag; coef_im[k] = 0.0; break;
        case 1: coef_re[k] = 0.0; coef_im[k] = mag; break;
        case 2: coef_re[k] = -mag; coef_im[k] = 0.0; break;
        default: coef_re[k] = 0.0; coef_im[k] = -mag; break;
      }
    }
    double sum_re = 0.0, sum_im = 0.0;
    for (std::size_t b = 0; b < nbins; ++b) {
      const double* m = bins.moments.data() + b * (kOrder + 1);
      double p_re = 0.0, p_im = 0.0;
      for (int k = kOrder; k >= 0; --k) {
        p_re += coef_re[k] * m[k];
        p_im += coef_im[k] * m[k];
      }
      const double theta = t * bins.centers[b];
      const double c = std::cos(theta), s = std::sin(theta);
      sum_re += c * p_re - s * p_im;
      sum_im += s * p_re + c * p_im;
    }
    for (double x : bins.direct) {
      sum_re += std::cos(t * x);
      sum_im += std::sin(t * x);
    }
    psi[idx] = Complex(sum_re * inv_n, sum_im * inv_n);
  });
  return CfGrid({ts.begin(), ts.end()}, std::move(psi));
}

double ks_distance(const EmpiricalDist& a, const EmpiricalDist& b) {
  const auto av = a.values();
  const auto bv = b.values();
  const double na = static_cast<double>(av.size());
  const double nb = static_cast<double>(bv.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < av.size() && j < bv.size()) {
    const double x = std::min(av[i], bv[j]);
    while (i < av.size() && av[i] <= x) ++i;
    while (j < bv.size() && bv[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double trimmed_ks_distance(const EmpiricalDist& a, const EmpiricalDist& b, double trim) {
  if (!(trim >= 0.0 && trim < 0.5)) throw std::invalid_argument("trimmed_ks: trim in [0, 0.5)");
  const double lo = std::max(a.quantile(trim), b.quantile(trim));
  const double hi = std::min(a.quantile(1.0 - trim), b.quantile(1.0 - trim));
  if (lo > hi) return ks_distance(a, b);
  const auto av = a.values();
  const auto bv = b.values();
  const double na = static_cast<double>(av.size());
  const double nb = static_cast<double>(bv.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < av.size() && j < bv.size()) {
    const double x = std::min(av[i], bv[j]);
    while (i < av.size() && av[i] <= x) ++i;
    while (j < bv.size() && bv[j] <= x) ++j;
    if (x >= lo && x <= hi) {
      d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
  }
  return d;
}

namespace {

// max over distinct x in `from` of F_from(x) - F_to(x + eps).
double max_lead(std::span<const double> from, std::span<const double> to, double eps) {
  const double nf = static_cast<double>(from.size());
  const double nt = static_cast<double>(to.size());
  std::size_t j = 0;
  double worst = -1.0;
  std::size_t i = 0;
  while (i < from.size()) {
    const double x = from[i];
    while (i < from.size() && from[i] == x) ++i;
    const double shifted = x + eps;
    while (j < to.size() && to[j] <= shifted) ++j;
    worst = std::max(worst, static_cast<double>(i) / nf - static_cast<double>(j) / nt);
  }
  return worst;
}

}  // namespace

double levy_distance(const EmpiricalDist& a, const EmpiricalDist& b) {
  const auto av = a.values();
  const auto bv = b.values();
  auto ok = [&](double eps) {
    return max_lead(bv, av, eps) <= eps && max_lead(av, bv, eps) <= eps;
  };
  double lo = 0.0, hi = 1.0;
  if (ok(0.0)) return 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

double ks_noise_level(std::size_t n1, std::size_t n2, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  return c * std::sqrt((a + b) / (a * b));
}

double cf_sup_distance(const CfGrid& a, const CfGrid& b, double t_hi) {
  if (a.size() != b.size()) throw std::invalid_argument("cf_sup_distance: grids differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.t(i) != b.t(i)) throw std::invalid_argument("cf_sup_distance: grids differ");
    if (a.t(i) > t_hi) break;
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

EmpiricalDist convolve(const EmpiricalDist& a, const EmpiricalDist& b, RngStream& rng,
                       std::size_t out) {
  if (out == 0) throw std::invalid_argument("convolve: out = 0");
  RngStream base = rng.fork();
  std::vector<double> v(out);
  parallel_chunks(out, [&](std::size_t c, std::size_t begin, std::size_t end) {
    RngStream s = base.substream(c);
    for (std::size_t i = begin; i < end; ++i) v[i] = a.resample(s) + b.resample(s);
  });
  return EmpiricalDist(std::move(v), "convolve(" + base.describe() + ")");
}

}  // namespace qsfp
