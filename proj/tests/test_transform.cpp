#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "qsfp/quicksort.hpp"
#include "qsfp/transform.hpp"

using namespace qsfp;

namespace {

// int_0^1 e^{i t g(u)} du by composite Simpson, for psi == 1.
Complex t_of_one_oracle(double t) {
  const int m = 200000;
  Complex s = std::polar(1.0, t * g(0.0)) + std::polar(1.0, t * g(1.0));
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * std::polar(1.0, t * g(double(i) / m));
  return s / (3.0 * m);
}

}  // namespace

TEST_CASE("T of delta_0 is the law of g(U)") {
  RngStream rng(1);
  const std::size_t n = 1'000'000;
  const EmpiricalDist d = apply_T(EmpiricalDist::point_mass(0.0), rng, n);
  const double sd = std::sqrt(g_second_moment());
  CHECK(std::abs(d.mean()) < 4.0 * sd / std::sqrt(double(n)));
  double m2 = 0.0;
  for (double v : d.values()) m2 += v * v;
  m2 /= n;
  CHECK(std::abs(m2 - g_second_moment()) < 0.001);
  CHECK(d[0] >= g(0.5) - 1e-12);
  CHECK(d[n - 1] <= 1.0);
  CHECK_THROWS_AS(apply_T(d, rng, 0), std::invalid_argument);
}

TEST_CASE("T0 fixes point masses and Cauchy laws") {
  RngStream rng(2);
  const EmpiricalDist c = apply_T0(EmpiricalDist::point_mass(1.25), rng, 1000);
  for (double v : c.values()) CHECK(v == doctest::Approx(1.25).epsilon(1e-15));
  const std::size_t n = 200000;
  const EmpiricalDist src = cauchy_sample({1.0, 0.5}, n, rng);
  const EmpiricalDist out = apply_T0(src, rng, n);
  const EmpiricalDist fresh = cauchy_sample({1.0, 0.5}, n, rng);
  CHECK(ks_distance(out, fresh) <= ks_noise_level(n, n));
  CHECK_THROWS_AS(apply_T0(src, rng, 0), std::invalid_argument);
}

TEST_CASE("iterated T0 concentrates Exp(1) at its mean") {
  RngStream rng(3);
  std::vector<double> e(100000);
  for (double& x : e) x = -std::log(rng.uniform_open());
  const auto traj = iterate(TransformKind::T0, EmpiricalDist(e), 20, rng, 100000);
  REQUIRE(traj.size() == 21);
  CHECK(traj.back().stddev() < 0.1);
  CHECK(std::abs(traj.back().mean() - 1.0) < 0.05);
}

TEST_CASE("iterate") {
  RngStream rng(4);
  const EmpiricalDist d({1.0, 2.0});
  const auto zero = iterate(TransformKind::T, d, 0, rng, 10);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].size() == 2);
  const auto fixed = iterate(TransformKind::T0, EmpiricalDist::point_mass(-3.0), 5, rng, 50);
  for (const auto& s : fixed)
    for (double v : s.values()) CHECK(v == doctest::Approx(-3.0));

  RngStream a(9), b(9);
  const auto t1 = iterate(TransformKind::T, EmpiricalDist::point_mass(0.0), 3, a, 1000);
  const auto t2 = iterate(TransformKind::T, EmpiricalDist::point_mass(0.0), 3, b, 1000);
  for (std::size_t k = 0; k < t1.size(); ++k) CHECK(ks_distance(t1[k], t2[k]) == 0.0);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("variance along the T trajectory approaches 7 - 2 pi^2 / 3") {
  RngStream rng(5);
  const auto traj = iterate(TransformKind::T, EmpiricalDist::point_mass(0.0), 25, rng, 300000);
  std::vector<double> err;
  for (const auto& s : traj) err.push_back(std::abs(s.variance() - limit_variance()));
  CHECK(err[25] < 0.03 * limit_variance());
  CHECK(err[10] < err[3]);
  CHECK(err[3] < err[1]);
}

TEST_CASE("apply_T_cf on psi == 1") {
  const auto ts = make_grid();
  const CfGrid one(ts, std::vector<Complex>(ts.size(), 1.0));
  const CfGrid t1 = apply_T_cf(one);
  CHECK(t1[0] == Complex(1.0, 0.0));
  CHECK(t1.within_unit_disk(1e-8));
  for (std::size_t k : {1u, 50u, 120u, 170u, 200u}) {
    CHECK(std::abs(t1[k] - t_of_one_oracle(ts[k])) < 1e-7);
  }
}

TEST_CASE("apply_T_cf matches sampled T") {
  RngStream rng(6);
  const auto ts = make_grid();
  const std::size_t n = 400000;
  for (const EmpiricalDist& d : {EmpiricalDist::point_mass(0.0), cauchy_sample({0.0, 1.0}, n, rng)}) {
    const CfGrid sampled = empirical_cf(apply_T(d, rng, n), ts);
    const CfGrid quad = apply_T_cf(empirical_cf(d, ts));
    CHECK(cf_sup_distance(sampled, quad) < 0.02);
  }
}

TEST_CASE("apply_T2") {
  RngStream rng(7);
  const std::size_t n = 200000;
  const EmpiricalDist a = apply_T(EmpiricalDist::point_mass(0.0), rng, n);
  const EmpiricalDist b = cauchy_sample({0.0, 1.0}, n, rng);

  const CoupledSample diag = CoupledSample::diagonal(a, 1000, rng);
  const CoupledSample diag2 = apply_T2(diag, rng, 1000);
  for (const auto& [x, y] : diag2.pairs()) CHECK(x == y);

  const CoupledSample ind = CoupledSample::independent(a, b, n, rng);
  const CoupledSample out = apply_T2(ind, rng, n);
  CHECK(out.size() == n);
  const double noise = ks_noise_level(n, n);
  CHECK(ks_distance(out.first(), apply_T(ind.first(), rng, n)) <= noise);
  CHECK(ks_distance(out.second(), apply_T(ind.second(), rng, n)) <= noise);
  CHECK(ks_distance(out.difference(), apply_T0(ind.difference(), rng, n)) <= noise);
  CHECK_THROWS_AS(apply_T2(ind, rng, 0), std::invalid_argument);
  CHECK_THROWS_AS(CoupledSample({}), std::invalid_argument);
}

TEST_CASE("write_trajectory") {
  const auto dir = std::filesystem::temp_directory_path() / "qsfp_traj_test";
  std::filesystem::remove_all(dir);
  RngStream rng(8);
  const auto traj = iterate(TransformKind::T, EmpiricalDist::point_mass(0.0), 2, rng, 100);
  write_trajectory(dir, traj, 8, {{"variance", {0.0, 0.1, 0.2}}});
  CHECK(std::filesystem::exists(dir / "stage_000.csv"));
  CHECK(std::filesystem::exists(dir / "stage_002.csv"));
  std::ifstream in(dir / "manifest.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["seed"] == 8);
  CHECK(j["stages"].size() == 3);
  CHECK(j["stages"][1]["metrics"]["variance"].get<double>() == doctest::Approx(0.1));
  std::filesystem::remove_all(dir);
}
