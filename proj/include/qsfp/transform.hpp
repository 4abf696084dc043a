#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qsfp/dist.hpp"
#include "qsfp/quadrature.hpp"
#include "qsfp/rng.hpp"

namespace qsfp {

enum class TransformKind { T, T0 };

/// `out` draws of U Z + (1 - U) Z* + g(U), Z and Z* resampled independently
/// from d with replacement.
EmpiricalDist apply_T(const EmpiricalDist& d, RngStream& rng, std::size_t out);

/// `out` draws of U Z + (1 - U) Z*.
EmpiricalDist apply_T0(const EmpiricalDist& d, RngStream& rng, std::size_t out);

EmpiricalDist apply(TransformKind kind, const EmpiricalDist& d, RngStream& rng,
                    std::size_t out);

/// (T psi)(t) = int_0^1 psi(u t) psi((1 - u) t) exp(i t g(u)) du on the grid
/// of `psi`. Off-grid values come from monotone cubic interpolation of the
/// real and imaginary parts; the integrand is symmetric in u <-> 1 - u, so
/// only [0, 1/2] is integrated, with breakpoints at the interpolation knots.
/// Throws QuadratureError if a point fails to converge.
CfGrid apply_T_cf(const CfGrid& psi, const QuadratureConfig& quad = {});

/// A sample from a law on R^2.
class CoupledSample {
 public:
  using Pair = std::pair<double, double>;

  explicit CoupledSample(std::vector<Pair> pairs);

  /// Independent coupling: x resampled from a, y from b.
  static CoupledSample independent(const EmpiricalDist& a, const EmpiricalDist& b,
                                   std::size_t n, RngStream& rng);
  /// Diagonal coupling: x = y resampled from a.
  static CoupledSample diagonal(const EmpiricalDist& a, std::size_t n, RngStream& rng);

  std::span<const Pair> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  EmpiricalDist first() const;
  EmpiricalDist second() const;
  /// Law of X - Y.
  EmpiricalDist difference() const;

 private:
  std::vector<Pair> pairs_;
};

/// `out` draws of (U X + (1-U) X* + g(U), U Y + (1-U) Y* + g(U)) with the
/// pairs (X, Y), (X*, Y*) resampled from c and one shared U per draw.
CoupledSample apply_T2(const CoupledSample& c, RngStream& rng, std::size_t out);

/// [d, op(d), ..., op^n(d)], every stage after the first of size `out`.
std::vector<EmpiricalDist> iterate(TransformKind kind, const EmpiricalDist& d,
                                   std::size_t n, RngStream& rng, std::size_t out);

/// One CSV per stage (stage_000.csv, ...) plus manifest.json with the
/// stage index, sample size, provenance and any per-stage metrics.
void write_trajectory(const std::filesystem::path& dir, const std::vector<EmpiricalDist>& stages,
                      std::uint64_t seed,
                      const std::map<std::string, std::vector<double>>& metrics = {});

}  // namespace qsfp
