#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsfp {

struct QuadratureConfig {
  double abs_tol = 1e-8;
  double rel_tol = 0.0;
  std::size_t max_intervals = 20000;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class V>
struct QuadratureResult {
  V value{};
  double error = 0.0;
  std::size_t intervals = 0;
  std::size_t evaluations = 0;
};

namespace detail {

inline double quad_norm(double v) { return std::abs(v); }
inline double quad_norm(const std::complex<double>& v) { return std::abs(v); }
template <class T, std::size_t N>
double quad_norm(const std::array<T, N>& v) {
  double s = 0.0;
  for (const auto& x : v) s += quad_norm(x);
  return s;
}

template <class V>
V scaled(const V& v, double a) {
  if constexpr (requires { v * a; }) {
    return v * a;
  } else {
    V out = v;
    for (auto& x : out) x *= a;
    return out;
  }
}

template <class V>
void accumulate(V& acc, const V& v, double w) {
  if constexpr (requires { acc += v * w; }) {
    acc += v * w;
  } else {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i] * w;
  }
}

template <class V>
V difference(const V& a, const V& b) {
  if constexpr (requires { a - b; }) {
    return a - b;
  } else {
    V out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
  }
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class V, class F>
Panel<V> gauss_kronrod(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const V fc = f(center);
  V kronrod = scaled(fc, kKronrodWeights[7]);
  V gauss = scaled(fc, kGaussWeights[3]);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const V f1 = f(center - dx);
    const V f2 = f(center + dx);
    accumulate(kronrod, f1, kKronrodWeights[j]);
    accumulate(kronrod, f2, kKronrodWeights[j]);
    if (j % 2 == 1) {
      accumulate(gauss, f1, kGaussWeights[j / 2]);
      accumulate(gauss, f2, kGaussWeights[j / 2]);
    }
  }
  kronrod = scaled(kronrod, half);
  gauss = scaled(gauss, half);
  return {a, b, kronrod, quad_norm(difference(kronrod, gauss))};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature over the partition
/// given by `points` (sorted, at least two entries; interior entries are
/// known breakpoints of the integrand). The panel with the largest error
/// estimate is bisected until the summed estimate meets the tolerance.
/// Throws QuadratureError when max_intervals is reached first.
template <class F>
auto integrate(F&& f, std::span<const double> points, const QuadratureConfig& cfg = {})
    -> QuadratureResult<std::decay_t<decltype(f(0.0))>> {
  using V = std::decay_t<decltype(f(0.0))>;
  if (points.size() < 2) throw std::invalid_argument("integrate: need two points");
  std::priority_queue<detail::Panel<V>> heap;
  QuadratureResult<V> result;
  V total{};
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] >= points[i])) throw std::invalid_argument("integrate: unsorted points");
    if (points[i + 1] == points[i]) continue;
    auto p = detail::gauss_kronrod<V>(f, points[i], points[i + 1]);
    result.evaluations += 15;
    detail::accumulate(total, p.value, 1.0);
    error += p.error;
    heap.push(std::move(p));
  }
  auto target = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * detail::quad_norm(total)); };
  while (!heap.empty() && error > target()) {
    if (heap.size() >= cfg.max_intervals) {
      throw QuadratureError("integrate: no convergence within " +
                            std::to_string(cfg.max_intervals) + " panels (error " +
                            std::to_string(error) + ")");
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("integrate: panel cannot be subdivided further");
    }
    auto left = detail::gauss_kronrod<V>(f, worst.a, mid);
    auto right = detail::gauss_kronrod<V>(f, mid, worst.b);
    result.evaluations += 30;
    detail::accumulate(total, worst.value, -1.0);
    detail::accumulate(total, left.value, 1.0);
    detail::accumulate(total, right.value, 1.0);
    error += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }
  // Re-sum from the panels to shed the drift of incremental updates.
  V value{};
  double err = 0.0;
  result.intervals = heap.size();
  while (!heap.empty()) {
    detail::accumulate(value, heap.top().value, 1.0);
    err += heap.top().error;
    heap.pop();
  }
  result.value = value;
  result.error = err;
  return result;
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), cfg);
}

}  // namespace qsfp
