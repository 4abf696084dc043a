#pragma once

#include <cstdint>

#include "qsfp/dist.hpp"
#include "qsfp/rng.hpp"

namespace qsfp {

/// Expected partitioning cost g(u) = 2u ln u + 2(1-u) ln(1-u) + 1, with the
/// continuous extension g(0) = g(1) = 1. Throws outside [0, 1].
double g(double u);

/// E g(U)^2 = 7/3 - 2 pi^2 / 9.
double g_second_moment();

/// Variance of the zero-mean fixed point: 3 E g(U)^2 = 7 - 2 pi^2 / 3.
double limit_variance();

struct ComparisonCost {
  std::uint64_t n = 0;
  std::uint64_t comparisons = 0;
};

/// One exact draw of the Quicksort comparison count C_n, generated from
/// pivot ranks on an explicit stack of subproblem sizes.
ComparisonCost quicksort_comparisons(std::uint64_t n, RngStream& rng);

/// H_n, compensated summation up to 10^6 terms and the asymptotic series beyond.
double harmonic_number(std::uint64_t n);

/// E C_n = 2 (n + 1) H_n - 4 n.
double expected_comparisons(std::uint64_t n);

/// reps i.i.d. draws of (C_n - E C_n) / n.
EmpiricalDist normalized_costs(std::uint64_t n, std::size_t reps, RngStream& rng);

}  // namespace qsfp
