#include <doctest.h>

#include <cmath>

#include "qsfp/fixed_point.hpp"
#include "qsfp/quicksort.hpp"

using namespace qsfp;

namespace {

const EmpiricalDist& mu_small() {
  static const EmpiricalDist mu = [] {
    RngStream rng(100);
    return approximate_mu(25, 300000, rng);
  }();
  return mu;
}

}  // namespace

TEST_CASE("one iteration gives the law of g(U)") {
  RngStream rng(1);
  const std::size_t n = 100000;
  const EmpiricalDist one = approximate_mu(1, n, rng);
  std::vector<double> gu(n);
  for (double& v : gu) v = g(rng.uniform());
  const EmpiricalDist direct(gu);
  CHECK(ks_distance(one, direct) <= ks_noise_level(n, n));
  CHECK_THROWS_AS(approximate_mu(0, 1000, rng), std::invalid_argument);
  CHECK_THROWS_AS(approximate_mu(3, 999, rng), std::invalid_argument);
}

TEST_CASE("approximate_mu is centered with the limit variance") {
  const EmpiricalDist& mu = mu_small();
  CHECK(std::abs(mu.mean()) < 4.0 * mu.stddev() / std::sqrt(double(mu.size())));
  CHECK(std::abs(mu.variance() - limit_variance()) < 0.03 * limit_variance());
}

TEST_CASE("residual separates fixed points from delta_0") {
  RngStream rng(2);
  const FixedPointReport bad = residual(EmpiricalDist::point_mass(0.0, 10000), rng);
  CHECK(bad.residual_ks > 0.4);
  CHECK(bad.residual_cf > 0.1);
  const FixedPointReport good = residual(mu_small(), rng);
  CHECK(good.residual_ks <= ks_noise_level(300000, 300000));
  CHECK(good.residual_cf <= cf_tolerance(300000));
  CHECK(good.sample_size == 300000);
  CHECK(good.variance == doctest::Approx(mu_small().variance()));
  CHECK_FALSE(good.provenance.empty());
}

TEST_CASE("contraction profile decreases") {
  RngStream rng(3);
  const auto prof = contraction_profile(12, 100000, rng);
  REQUIRE(prof.size() == 13);
  CHECK(prof[0].iterations == 0);
  CHECK(prof[12].residual_cf < prof[3].residual_cf);
  double best = prof[0].residual_cf;
  for (const auto& r : prof) {
    CHECK(r.residual_cf <= best + cf_tolerance(100000));
    best = std::min(best, r.residual_cf);
  }
}

TEST_CASE("verify_theorem1 on shifted and convolved mu") {
  RngStream rng(4);
  const Theorem1Report zero = verify_theorem1({0.0, 0.0}, mu_small(), rng);
  CHECK(zero.passed);
  CHECK_FALSE(zero.residuals.trimmed_ks);
  CHECK(zero.residuals.residual_ks <= ks_noise_level(300000, 300000));
  const Theorem1Report shift = verify_theorem1({1.0, 0.0}, mu_small(), rng);
  CHECK(shift.passed);
  CHECK(shift.residuals.mean == doctest::Approx(1.0).epsilon(0.01));
  const Theorem1Report conv = verify_theorem1({1.0, 0.5}, mu_small(), rng);
  CHECK(conv.passed);
  CHECK(conv.residuals.trimmed_ks);
  CHECK(conv.residuals.residual_cf <= cf_tolerance(300000));
  CHECK_THROWS_AS(verify_theorem1({0.0, -1.0}, mu_small(), rng), std::invalid_argument);
  CHECK(theorem1_cells().size() == 9);
}

TEST_CASE("sweep is reproducible") {
  RngStream a(5), b(5);
  const std::vector<CauchyParams> cells{{0.0, 1.0}, {-2.0, 0.5}};
  Theorem1Options opts;
  opts.sample_size = 50000;
  const auto ra = sweep_theorem1(cells, mu_small(), a, opts);
  const auto rb = sweep_theorem1(cells, mu_small(), b, opts);
  REQUIRE(ra.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(ra[i].cf_route_residual == rb[i].cf_route_residual);
    CHECK(ra[i].residuals.residual_ks == rb[i].residuals.residual_ks);
  }
}

TEST_CASE("corollary check at reduced scale") {
  RngStream rng(6);
  Corollary2Options opts;
  opts.iterations = 25;
  opts.sample_size = 300000;
  opts.quicksort_n = 2000;
  opts.quicksort_reps = 50000;
  opts.tolerance = 0.03;
  const Corollary2Report rep = verify_corollary2(mu_small(), rng, opts);
  CHECK(rep.ks_mu_vs_independent <= rep.noise_level);
  CHECK(rep.ks_mu_vs_costs <= 0.03);
  CHECK(rep.ks_mu_vs_convolved > 0.1);
  CHECK(rep.passed);
}
