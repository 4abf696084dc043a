#include "qsfp/quicksort.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qsfp/parallel.hpp"

namespace qsfp {

double g(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("g: u outside [0, 1]");
  if (u == 0.0 || u == 1.0) return 1.0;
  return 2.0 * u * std::log(u) + 2.0 * (1.0 - u) * std::log1p(-u) + 1.0;
}

double g_second_moment() { return 7.0 / 3.0 - 2.0 * std::numbers::pi * std::numbers::pi / 9.0; }

double limit_variance() { return 3.0 * g_second_moment(); }

ComparisonCost quicksort_comparisons(std::uint64_t n, RngStream& rng) {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> stack;
  stack.reserve(128);
  stack.push_back(n);
  while (!stack.empty()) {
    const std::uint64_t size = stack.back();
    stack.pop_back();
    if (size <= 1) continue;
    total += size - 1;
    if (size == 2) continue;
    const std::uint64_t left = rng.index(size);  // pivot rank - 1
    const std::uint64_t right = size - 1 - left;
    // Larger part below, smaller on top: the stack stays O(log n) deep.
    if (left < right) {
      stack.push_back(right);
      stack.push_back(left);
    } else {
      stack.push_back(left);
      stack.push_back(right);
    }
  }
  return {n, total};
}

double harmonic_number(std::uint64_t n) {
  if (n <= 1'000'000) {
    double sum = 0.0, comp = 0.0;
    for (std::uint64_t k = n; k >= 1; --k) {
      const double y = 1.0 / static_cast<double>(k) - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    return sum;
  }
  const double x = static_cast<double>(n);
  const double x2 = x * x;
  return std::log(x) + std::numbers::egamma + 1.0 / (2.0 * x) - 1.0 / (12.0 * x2) +
         1.0 / (120.0 * x2 * x2);
}

double expected_comparisons(std::uint64_t n) {
  if (n == 0) return 0.0;
  const double x = static_cast<double>(n);
  return 2.0 * (x + 1.0) * harmonic_number(n) - 4.0 * x;
}

EmpiricalDist normalized_costs(std::uint64_t n, std::size_t reps, RngStream& rng) {
  if (n == 0 || reps == 0) throw std::invalid_argument("normalized_costs: need n >= 1, reps >= 1");
  const double mean = expected_comparisons(n);
  const double scale = static_cast<double>(n);
  RngStream base = rng.fork();
  std::vector<double> v(reps);
  // Small chunks: each draw already costs O(n).
  parallel_chunks(
      reps,
      [&](std::size_t c, std::size_t begin, std::size_t end) {
        RngStream s = base.substream(c);
        for (std::size_t i = begin; i < end; ++i) {
          const auto cost = quicksort_comparisons(n, s);
          v[i] = (static_cast<double>(cost.comparisons) - mean) / scale;
        }
      },
      256);
  return EmpiricalDist(std::move(v), "quicksort(n=" + std::to_string(n) + "," + base.describe() + ")");
}

}  // namespace qsfp
