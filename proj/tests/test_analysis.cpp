#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "qsfp/analysis.hpp"
#include "qsfp/fixed_point.hpp"
#include "qsfp/quicksort.hpp"

using namespace qsfp;

namespace {

const EmpiricalDist& mu_hat() {
  static const EmpiricalDist mu = [] {
    RngStream rng(200);
    return approximate_mu(25, 1'000'000, rng);
  }();
  return mu;
}

const CfGrid& psi_mu() {
  static const CfGrid psi = empirical_cf(mu_hat(), make_grid());
  return psi;
}

CfGrid constant_one() {
  const auto ts = make_grid();
  return CfGrid(ts, std::vector<Complex>(ts.size(), 1.0));
}

CfGrid from_function(const std::function<Complex(double)>& f) {
  const auto ts = make_grid();
  std::vector<Complex> v;
  for (double t : ts) v.push_back(f(t));
  v[0] = 1.0;
  return CfGrid(ts, v);
}

// a(t) for psi == 1 by composite Simpson on [0, 1].
Complex a_of_one_oracle(double t) {
  const int m = 200000;
  auto f = [t](double u) {
    const double x = t * g(u);
    return Complex(std::cos(x) - 1.0, std::sin(x) - x);
  };
  Complex s = f(0.0) + f(1.0);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(double(i) / m);
  return s / (3.0 * m);
}

QuadratureConfig strict() {
  QuadratureConfig q;
  q.abs_tol = 1e-14;
  q.max_intervals = 200000;
  return q;
}

}  // namespace

TEST_CASE("r_grid") {
  const GridFunction r1 = r_grid(constant_one());
  for (const Complex& z : r1.values) CHECK(z == Complex(0.0, 0.0));
  const std::vector<double> ts{0.0, 1e-4, 1.0};
  const GridFunction rc = r_grid(cauchy_cf({0.0, 1.0}, ts));
  CHECK(rc.values[2].real() == doctest::Approx(std::exp(-1.0) - 1.0));
  CHECK(rc.values[2].real() == doctest::Approx(-0.632121).epsilon(1e-6));
  const GridFunction rm = r_grid(cauchy_cf({2.0, 0.7}, ts));
  const Complex slope = rm.values[1] / ts[1];
  CHECK(std::abs(slope - Complex(-0.7, 2.0)) < 1e-3);
  CHECK(rm.values[0] == Complex(0.0, 0.0));
}

TEST_CASE("a_bound") {
  CHECK(a_bound(0.0) == 0.0);
  CHECK(a_bound(1.0) == doctest::Approx(7.0 / 6.0 - std::numbers::pi * std::numbers::pi / 9.0));
  CHECK(a_bound(1.0) == doctest::Approx(0.070046).epsilon(1e-5));
  CHECK(a_bound(2.0) == doctest::Approx(0.280183).epsilon(1e-5));
  CHECK_THROWS_AS(a_bound(-1.0), std::invalid_argument);
}

TEST_CASE("b for psi == 1 is a(t)") {
  const BTerms bt = b_terms(constant_one(), strict());
  CHECK(bt.b[0] == Complex(0.0, 0.0));
  for (std::size_t k = 1; k < bt.ts.size(); ++k) {
    CHECK(std::abs(bt.product[k]) == 0.0);
    CHECK(std::abs(bt.drift[k]) == 0.0);
    CHECK(std::abs(bt.b[k] - bt.a[k]) == 0.0);
    CHECK(std::abs(bt.a[k]) <= a_bound(bt.ts[k]) * (1.0 + 1e-9));
  }
  for (std::size_t k : {1u, 60u, 140u, 200u}) {
    CHECK(std::abs(bt.a[k] - a_of_one_oracle(bt.ts[k])) < 1e-9);
  }
  // The bound is the leading term of a(t) as t -> 0.
  CHECK(std::abs(bt.a[1]) / a_bound(bt.ts[1]) > 0.5);
  CHECK(std::abs(bt.a[1]) / a_bound(bt.ts[1]) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("a(t) stays under the bound for Cauchy and mu") {
  for (const CfGrid& psi : {cauchy_cf({0.0, 1.0}, make_grid()), psi_mu()}) {
    const BTerms bt = b_terms(psi, strict());
    for (std::size_t k = 1; k < bt.ts.size(); ++k) {
      CHECK(std::abs(bt.a[k]) <= a_bound(bt.ts[k]) * (1.0 + 1e-9) + 1e-14);
    }
  }
}

TEST_CASE("b(t) = O(t^2) for mu") {
  const GridFunction b = b_grid(psi_mu());
  double worst = 0.0;
  for (std::size_t k = 1; k < b.ts.size() && b.ts[k] <= 0.1; ++k) {
    worst = std::max(worst, std::abs(b.values[k]) / (b.ts[k] * b.ts[k]));
  }
  CHECK(worst < 1.0);
}

TEST_CASE("integral equation residual") {
  CHECK(integral_equation_residual(psi_mu()).max_residual < 1e-2);
  const CfGrid conv = psi_mu().times(cauchy_cf({1.0, 0.5}, make_grid()));
  CHECK(integral_equation_residual(conv).max_residual < 1e-2);
  const IntegralEquationReport one = integral_equation_residual(constant_one());
  for (std::size_t k = 0; k < one.residual.ts.size(); ++k) {
    if (one.residual.ts[k] >= 1.0 && one.residual.ts[k] <= 5.0) {
      CHECK(std::abs(one.residual.values[k]) > 0.05);
    }
  }
}

TEST_CASE("residual is stable under stricter quadrature") {
  const double loose = integral_equation_residual(psi_mu()).max_residual;
  const double tight = integral_equation_residual(psi_mu(), strict()).max_residual;
  CHECK(std::abs(loose - tight) < 1e-6);
}

TEST_CASE("solution constant c") {
  const ConstantProfile mu = solution_constant_c(psi_mu());
  CHECK(mu.dispersion < 0.05 * (std::abs(mu.c) + 1.0));
  CHECK(mu.c_of_t.size() == 200);
  const ConstantProfile one = solution_constant_c(constant_one());
  CHECK(one.dispersion > 0.1);

  // A location shift e^{imt} adds i m to the linear coefficient c - 2J.
  const double m = 0.8;
  const CfGrid shifted = psi_mu().times(cauchy_cf({m, 0.0}, make_grid()));
  const ConstantProfile sh = solution_constant_c(shifted);
  const Complex base = mu.c - 2.0 * estimate_J(psi_mu()).J;
  const Complex moved = sh.c - 2.0 * estimate_J(shifted).J;
  CHECK(std::abs(moved - base - Complex(0.0, m)) < 0.02);

  CHECK_THROWS_AS(solution_constant_c(psi_mu().truncated(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(solution_constant_c(psi_mu().thinned(8)), std::invalid_argument);
}

TEST_CASE("J for mu") {
  const JEstimate j = estimate_J(psi_mu(), {}, mu_hat().size());
  CHECK(std::isfinite(j.J.real()));
  CHECK(j.refinement_delta < 1e-3);
  CHECK(j.decay_exponent > 4.0 / 3.0);
  CHECK(j.noise > 0.0);
  CHECK(j.noise < 0.02);
  const ConstantProfile c = solution_constant_c(psi_mu());
  CHECK(std::abs(c.c - 2.0 * j.J) < 0.02);
}

TEST_CASE("J diverges when b decays no faster than v") {
  const CfGrid stable = from_function([](double t) { return std::exp(-std::pow(t, 0.4)); });
  CHECK_THROWS_AS(estimate_J(stable), std::domain_error);
}

TEST_CASE("estimate_beta") {
  const SlopeEstimate exact = estimate_beta(cauchy_cf({1.0, 0.5}, make_grid()));
  CHECK(exact.beta_re == doctest::Approx(-0.5).epsilon(0.02 / 0.5));
  CHECK(std::abs(exact.beta_im - 1.0) < 0.02);
  CHECK(exact.expansion_ok);
  CHECK(exact.sensitivity.size() == 3);
  CHECK(exact.cauchy().sigma == doctest::Approx(exact.sigma()));

  const SlopeEstimate mu = estimate_beta(psi_mu());
  CHECK(std::abs(mu.beta()) <= 0.02);

  RngStream rng(3);
  const std::size_t n = mu_hat().size();
  const EmpiricalDist nu = convolve(mu_hat(), cauchy_sample({-2.0, 1.0}, n, rng), rng, n);
  const SlopeEstimate est = estimate_beta(empirical_cf(nu, make_grid()));
  CHECK(std::abs(est.m() + 2.0) < 0.05);
  CHECK(std::abs(est.sigma() - 1.0) < 0.05);

  const SlopeEstimate bad = estimate_beta(from_function([](double t) { return std::exp(-std::sqrt(t)); }));
  CHECK_FALSE(bad.expansion_ok);
  CHECK_THROWS_AS(fit_slope(psi_mu(), 1e-3), std::invalid_argument);
}

TEST_CASE("three slope estimates agree for a convolved fixed point") {
  RngStream rng(4);
  const std::size_t n = mu_hat().size();
  const EmpiricalDist nu = convolve(mu_hat(), cauchy_sample({1.0, 0.5}, n, rng), rng, n);
  const SlopeEstimate s = analyze_slope(empirical_cf(nu, make_grid()));
  CHECK(std::abs(s.beta() - Complex(-0.5, 1.0)) < 0.05);
  CHECK(std::abs((s.c - 2.0 * s.J) - Complex(-0.5, 1.0)) < 0.05);
  CHECK(s.consistency < 0.05);
}

TEST_CASE("envelope") {
  CHECK(envelope_check(constant_one()).c_hat == 0.0);
  const EnvelopeReport c = envelope_check(cauchy_cf({0.0, 1.0}, make_grid()));
  CHECK(std::isfinite(c.c_hat));
  // Direct evaluation for the Cauchy CF, where |r| is increasing.
  double expect = 0.0;
  for (double t : make_grid()) {
    if (t > 0) expect = std::max(expect, (1.0 - std::exp(-t)) / std::cbrt(t * t));
  }
  CHECK(c.c_hat == doctest::Approx(expect));
  const EnvelopeReport m = envelope_check(psi_mu());
  CHECK(std::isfinite(m.c_hat));
  CHECK(m.ratio[1] < 1e-3);
  CHECK(m.ratio[1] < m.ratio[100]);
}
