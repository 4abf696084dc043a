#include "qsfp/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qsfp/interpolation.hpp"
#include "qsfp/parallel.hpp"
#include "qsfp/quicksort.hpp"

namespace qsfp {
namespace {

// e^{ix} - 1 - ix without cancellation for small x.
Complex expi_m1_mix(double x) {
  if (std::abs(x) < 0.1) {
    Complex term(1.0, 0.0), sum(0.0, 0.0);
    const Complex ix(0.0, x);
    term = ix;
    for (int k = 2; k <= 16; ++k) {
      term *= ix / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  const double s = std::sin(0.5 * x);
  return {-2.0 * s * s, std::sin(x) - x};
}

// Knots of both psi(u t) and psi((1-u) t) mapped into [0, 1/2].
std::vector<double> half_breakpoints(std::span<const double> ts, std::size_t k) {
  const double t = ts[k];
  std::vector<double> points{0.0};
  for (std::size_t j = 1; j < k; ++j) {
    const double u = ts[j] / t;
    if (u < 0.5) points.push_back(u);
    else if (u > 0.5) points.push_back(1.0 - u);
  }
  points.push_back(0.5);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (pos - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

// int_lo^hi b(v)/v^2 dv with v = w^3 (lo, hi > 0).
Complex inverse_square_integral(const ComplexPchip& b, double lo, double hi,
                                const QuadratureConfig& quad) {
  auto f = [&b](double w) {
    const double w2 = w * w;
    return 3.0 * b(w2 * w) / (w2 * w2);
  };
  return integrate(f, std::cbrt(lo), std::cbrt(hi), quad).value;
}

void check_inner_grid(std::span<const double> ts) {
  if (ts.size() < 3 || ts.back() < 1.0) {
    throw std::invalid_argument("grid must extend to t = 1 for the inner integral");
  }
  std::size_t below_one = 0;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] <= 1.0) ++below_one;
    if (i >= 2 && ts[i] / ts[i - 1] > 1.25) {
      throw std::invalid_argument("grid too coarse for the inner integral");
    }
  }
  if (below_one < 20) throw std::invalid_argument("grid too coarse for the inner integral");
}

// Segment integrals of b/v^2 between consecutive positive grid points, with
// t = 1 inserted as an extra knot. Returns knots and cumulative integrals
// from the first positive knot.
struct InverseSquareTable {
  std::vector<double> knots;
  std::vector<Complex> cumulative;

  Complex from_knot_to_one(double t) const {
    const auto one = std::lower_bound(knots.begin(), knots.end(), 1.0) - knots.begin();
    const auto at = std::lower_bound(knots.begin(), knots.end(), t) - knots.begin();
    return cumulative[static_cast<std::size_t>(one)] - cumulative[static_cast<std::size_t>(at)];
  }
};

InverseSquareTable inverse_square_table(const GridFunction& b, const QuadratureConfig& quad) {
  const ComplexPchip interp(b.ts, b.values);
  InverseSquareTable table;
  for (std::size_t i = 1; i < b.ts.size(); ++i) table.knots.push_back(b.ts[i]);
  if (!std::binary_search(table.knots.begin(), table.knots.end(), 1.0)) {
    table.knots.insert(std::lower_bound(table.knots.begin(), table.knots.end(), 1.0), 1.0);
  }
  const std::size_t n = table.knots.size();
  std::vector<Complex> seg(n - 1);
  parallel_for(n - 1, [&](std::size_t j) {
    seg[j] = inverse_square_integral(interp, table.knots[j], table.knots[j + 1], quad);
  });
  table.cumulative.assign(n, Complex{});
  for (std::size_t j = 0; j + 1 < n; ++j) table.cumulative[j + 1] = table.cumulative[j] + seg[j];
  return table;
}

}  // namespace

GridFunction r_grid(const CfGrid& psi) {
  GridFunction r{{psi.ts().begin(), psi.ts().end()}, std::vector<Complex>(psi.size())};
  for (std::size_t i = 0; i < psi.size(); ++i) r.values[i] = psi[i] - 1.0;
  r.values[0] = 0.0;
  return r;
}

BTerms b_terms(const CfGrid& psi, const QuadratureConfig& quad) {
  const auto ts = psi.ts();
  const std::size_t n = ts.size();
  const ComplexPchip interp(ts, psi.psi());
  BTerms out;
  out.ts.assign(ts.begin(), ts.end());
  out.product.assign(n, {});
  out.drift.assign(n, {});
  out.a.assign(n, {});
  out.mean_r.assign(n, {});
  out.b.assign(n, {});
  QuadratureConfig half = quad;
  half.abs_tol = 0.5 * quad.abs_tol;

  parallel_for(n - 1, [&](std::size_t job) {
    const std::size_t k = job + 1;
    const double t = ts[k];
    const auto points = half_breakpoints(ts, k);
    // Every integrand is symmetric under u <-> 1 - u except r(ut); for that
    // one r(ut) + r((1-u)t) over [0, 1/2] gives the full integral.
    auto f = [&](double u) {
      const Complex p1 = interp(u * t);
      const Complex p2 = interp((1.0 - u) * t);
      const Complex r1 = p1 - 1.0, r2 = p2 - 1.0;
      const double gu = g(u);
      const Complex pp = p1 * p2;
      return std::array<Complex, 4>{2.0 * r1 * r2, 2.0 * (pp - 1.0) * gu,
                                    2.0 * pp * expi_m1_mix(t * gu), r1 + r2};
    };
    const auto res = integrate(f, std::span<const double>(points), half);
    out.product[k] = res.value[0];
    out.drift[k] = res.value[1];
    out.a[k] = res.value[2];
    out.mean_r[k] = res.value[3];
    out.b[k] = out.product[k] + Complex(0.0, t) * out.drift[k] + out.a[k];
  });
  return out;
}

GridFunction b_grid(const CfGrid& psi, const QuadratureConfig& quad) {
  return b_terms(psi, quad).b_function();
}

double a_bound(double t) {
  if (t < 0.0) throw std::invalid_argument("a_bound: t < 0");
  return 0.5 * g_second_moment() * t * t;
}

IntegralEquationReport integral_equation_residual(const CfGrid& psi,
                                                  const QuadratureConfig& quad) {
  const BTerms terms = b_terms(psi, quad);
  IntegralEquationReport rep;
  rep.residual.ts = terms.ts;
  rep.residual.values.assign(terms.ts.size(), {});
  for (std::size_t k = 1; k < terms.ts.size(); ++k) {
    const Complex e = (psi[k] - 1.0) - 2.0 * terms.mean_r[k] - terms.b[k];
    rep.residual.values[k] = e;
    rep.max_residual = std::max(rep.max_residual, std::abs(e));
  }
  return rep;
}

ConstantProfile solution_constant_c(const CfGrid& psi, const QuadratureConfig& quad) {
  check_inner_grid(psi.ts());
  const BTerms terms = b_terms(psi, quad);
  const auto table = inverse_square_table(terms.b_function(), quad);
  ConstantProfile prof;
  std::vector<double> re, im;
  for (std::size_t k = 1; k < psi.size(); ++k) {
    const double t = psi.t(k);
    const Complex c = (psi[k] - 1.0) / t + 2.0 * table.from_knot_to_one(t) - terms.b[k] / t;
    prof.c_of_t.ts.push_back(t);
    prof.c_of_t.values.push_back(c);
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  std::sort(re.begin(), re.end());
  std::sort(im.begin(), im.end());
  prof.c = {quantile_sorted(re, 0.5), quantile_sorted(im, 0.5)};
  const double iqr_re = quantile_sorted(re, 0.75) - quantile_sorted(re, 0.25);
  const double iqr_im = quantile_sorted(im, 0.75) - quantile_sorted(im, 0.25);
  prof.dispersion = std::hypot(iqr_re, iqr_im);
  return prof;
}

namespace {

struct JCore {
  Complex J;
  Complex correction;
  double exponent;
};

JCore j_core(const CfGrid& psi, const BTerms& terms, const QuadratureConfig& quad) {
  check_inner_grid(psi.ts());
  const auto table = inverse_square_table(terms.b_function(), quad);
  const double t1 = psi.t(1);
  // Power law |b(v)| ~ K v^p fitted on the points in (0, 10 t_1].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t k = 1; k < psi.size() && psi.t(k) <= 10.0 * t1; ++k) {
    const double mag = std::abs(terms.b[k]);
    if (mag <= 0.0) continue;
    const double x = std::log(psi.t(k)), y = std::log(mag);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  double p = 2.0;
  if (cnt >= 3) {
    const double denom = cnt * sxx - sx * sx;
    if (denom > 0.0) p = (cnt * sxy - sx * sy) / denom;
  }
  if (cnt >= 3 && p <= 1.0) {
    throw std::domain_error("estimate_J: b(v)/v^2 is not integrable at 0 (fitted exponent " +
                            std::to_string(p) + ")");
  }
  const Complex correction = terms.b[1] / (t1 * (p - 1.0));
  return {table.from_knot_to_one(t1) + correction, correction, p};
}

}  // namespace

JEstimate estimate_J(const CfGrid& psi, const QuadratureConfig& quad, std::size_t sample_size) {
  const BTerms terms = b_terms(psi, quad);
  const JCore full = j_core(psi, terms, quad);
  JEstimate est{full.J, full.correction, full.exponent, 0.0, 0.0};

  const CfGrid coarse = psi.thinned(2);
  try {
    const JCore half = j_core(coarse, b_terms(coarse, quad), quad);
    est.refinement_delta = std::abs(full.J - half.J);
  } catch (const std::invalid_argument&) {
    est.refinement_delta = std::numeric_limits<double>::quiet_NaN();
  }

  if (sample_size > 0) {
    // First-order propagation: psi-hat has sd ~ sqrt((1 - |psi|^2) / 2n); b
    // picks it up through the product term (~2|r|) and the drift term (~v).
    const double n = static_cast<double>(sample_size);
    double noise = 0.0;
    for (std::size_t k = 1; k + 1 < psi.size() && psi.t(k + 1) <= 1.0; ++k) {
      auto eps = [&](std::size_t i) {
        const double v = psi.t(i);
        const double sd = std::sqrt(std::max(0.0, 1.0 - std::norm(psi[i])) / (2.0 * n));
        return sd * (2.0 * std::abs(psi[i] - 1.0) + v) / (v * v);
      };
      noise += 0.5 * (eps(k) + eps(k + 1)) * (psi.t(k + 1) - psi.t(k));
    }
    est.noise = noise;
  }
  return est;
}

SlopeFit fit_slope(const CfGrid& psi, double t_fit) {
  // Normal equations for weights w = 1/t: sum w t^2, w t^3, w t^4.
  double s2 = 0, s3 = 0, s4 = 0;
  Complex r1{}, r2{};
  std::size_t cnt = 0;
  for (std::size_t k = 1; k < psi.size() && psi.t(k) <= t_fit; ++k) {
    const double t = psi.t(k);
    const Complex r = psi[k] - 1.0;
    s2 += t;
    s3 += t * t;
    s4 += t * t * t;
    r1 += r;      // w * t * r
    r2 += r * t;  // w * t^2 * r
    ++cnt;
  }
  if (cnt < 3) throw std::invalid_argument("fit_slope: fewer than three points in window");
  const double det = s2 * s4 - s3 * s3;
  SlopeFit fit;
  fit.window = t_fit;
  fit.points = cnt;
  fit.beta = (s4 * r1 - s3 * r2) / det;
  fit.gamma = (s2 * r2 - s3 * r1) / det;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k < psi.size() && psi.t(k) <= t_fit; ++k) {
    const double t = psi.t(k);
    const Complex res = (psi[k] - 1.0) - fit.beta * t - fit.gamma * t * t;
    num += std::norm(res / t) / t;
    den += 1.0 / t;
  }
  fit.fit_residual = std::sqrt(num / den);
  return fit;
}

SlopeEstimate estimate_beta(const CfGrid& psi, const SlopeOptions& opts) {
  const SlopeFit main = fit_slope(psi, opts.t_fit);
  SlopeEstimate est;
  est.beta_re = main.beta.real();
  est.beta_im = main.beta.imag();
  est.gamma = main.gamma;
  est.fit_residual = main.fit_residual;
  est.expansion_ok = main.fit_residual <= opts.residual_threshold;
  for (double w : opts.sensitivity_windows) {
    try {
      est.sensitivity.push_back(fit_slope(psi, w));
    } catch (const std::invalid_argument&) {
      // window holds too few grid points; omitted from the report
    }
  }
  return est;
}

SlopeEstimate analyze_slope(const CfGrid& psi, const QuadratureConfig& quad,
                            const SlopeOptions& opts) {
  SlopeEstimate est = estimate_beta(psi, opts);
  const ConstantProfile prof = solution_constant_c(psi, quad);
  const JEstimate j = estimate_J(psi, quad);
  est.c = prof.c;
  est.c_dispersion = prof.dispersion;
  est.J = j.J;
  est.consistency = std::abs(est.beta() - (est.c - 2.0 * est.J));
  return est;
}

EnvelopeReport envelope_check(const CfGrid& psi) {
  EnvelopeReport rep;
  rep.ts.assign(psi.ts().begin(), psi.ts().end());
  rep.ratio.assign(psi.size(), 0.0);
  double running = 0.0;
  for (std::size_t k = 1; k < psi.size(); ++k) {
    running = std::max(running, std::abs(psi[k] - 1.0));
    rep.ratio[k] = running / std::cbrt(psi.t(k) * psi.t(k));
    rep.c_hat = std::max(rep.c_hat, rep.ratio[k]);
  }
  return rep;
}

}  // namespace qsfp
