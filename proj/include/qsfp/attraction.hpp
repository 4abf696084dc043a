#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsfp/analysis.hpp"
#include "qsfp/dist.hpp"
#include "qsfp/rng.hpp"

namespace qsfp {

inline constexpr unsigned kMaxSplitLevel = 25;

/// The 2^n interval lengths after n rounds of uniform binary splitting of
/// [0, 1], left to right.
struct WeightVector {
  unsigned level = 0;
  std::vector<double> weights;
};

/// Throws std::invalid_argument for n > kMaxSplitLevel.
WeightVector split_weights(unsigned n, RngStream& rng);
double max_weight(const WeightVector& w);
double squared_weight_sum(const WeightVector& w);

/// A draw with the law of max_weight(split_weights(n)), found by
/// depth-first search that only opens intervals able to beat the current
/// maximum. Uniforms are drawn on demand, so this is much cheaper than
/// materializing 2^n weights.
double sample_max_weight(unsigned n, RngStream& rng);
/// Whether some level-n interval has length >= threshold (same law as
/// max_weight(split_weights(n)) >= threshold).
bool max_weight_reaches(unsigned n, double threshold, RngStream& rng);

struct ChernoffBound {
  unsigned n = 0;
  double x = 0.0;
  double value = 0.0;             ///< exp[-(n (ln n - ln(2 e x)) + x)]
  bool vacuous = false;           ///< value >= 1
  bool outside_validity = false;  ///< n < x
};

/// Bound on P(L_n >= e^{-x}). Throws for n == 0 or x <= 0.
ChernoffBound chernoff_bound(unsigned n, double x);

struct ChernoffReport {
  ChernoffBound bound;
  std::size_t reps = 0;
  std::size_t hits = 0;
  double frequency = 0.0;
  double slack = 0.0;  ///< 3 binomial standard errors at the bound
  bool passed = false;
};

/// Frequency of {L_n >= e^{-x}} over `reps` replications against the bound.
/// Vacuous cells pass. Throws for reps < 1000.
ChernoffReport verify_chernoff(unsigned n, double x, std::size_t reps, RngStream& rng);

/// A law to draw Z_i from.
class SourceSpec {
 public:
  enum class Kind { Cauchy, Exponential, SymmetricPareto, Empirical };

  static SourceSpec cauchy(const CauchyParams& p);
  static SourceSpec exponential(double rate = 1.0);
  /// Density |x|^{-2} / 2 on |x| >= 1.
  static SourceSpec symmetric_pareto();
  static SourceSpec empirical(EmpiricalDist d);

  Kind kind() const { return kind_; }
  std::string name() const;
  double draw(RngStream& rng) const;
  EmpiricalDist sample(std::size_t n, RngStream& rng) const;
  /// Cauchy target implied by the source's slope at 0, when known in closed
  /// form (Cauchy: itself; Exp(rate): (1/rate, 0); Pareto: (0, pi/2)).
  std::optional<CauchyParams> known_target() const;

 private:
  Kind kind_ = Kind::Cauchy;
  CauchyParams cauchy_{};
  double rate_ = 1.0;
  std::optional<EmpiricalDist> empirical_;
};

struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SummaryStats summarize(std::span<const double> v);

struct AttractionOptions {
  /// Sample size for the self-estimated target (empirical CF + slope fit).
  std::size_t estimate_sample = 1'000'000;
  SlopeOptions slope{};
  GridSpec grid{};
};

struct AttractionReport {
  std::string source;
  CauchyParams target;
  bool target_estimated = false;
  std::optional<SlopeEstimate> target_fit;
  std::size_t reps = 0;
  /// Index n = level; each entry compares reps draws of W_n with a fresh
  /// Cauchy(target) sample of the same size.
  std::vector<double> ks_by_stage;
  std::vector<double> levy_by_stage;
  std::vector<SummaryStats> w_stats;
  std::vector<SummaryStats> l_n_stats;
  std::vector<std::vector<double>> l_n_draws;
  double noise_level = 0.0;  ///< two-sample KS critical value at alpha = 1e-3
  /// Same critical value at alpha = 1e-3 / (max_level + 1), for claims about
  /// every stage at once.
  double familywise_noise_level = 0.0;

  /// ks_by_stage[k] <= min_{j<k} ks_by_stage[j] + noise_level for all k.
  bool ks_nonincreasing() const;
};

/// Draws W_n = sum_i V_i Z_i for n = 0..max_level. Without a target the
/// Cauchy parameters come from estimate_beta on the source's empirical CF
/// (sigma clamped at 0). Throws for max_level > kMaxSplitLevel or reps == 0.
AttractionReport t0_attraction(const SourceSpec& source, std::optional<CauchyParams> target,
                               unsigned max_level, std::size_t reps, RngStream& rng,
                               const AttractionOptions& opts = {});

enum class InitialCoupling { Independent, Diagonal };

struct CouplingOptions {
  std::size_t sample_size = 0;  ///< 0: min of the two input sizes
  InitialCoupling initial = InitialCoupling::Independent;
  /// A fitted -Re beta at or below this is taken as sigma = 0.
  double degenerate_tolerance = 0.02;
  SlopeOptions slope{};
  GridSpec grid{};
};

struct CouplingReport {
  CauchyParams target;
  Complex target_beta;
  /// sigma_hat == 0: the target is the point mass at m_hat, and
  /// difference_distance is the Levy distance instead of KS.
  bool degenerate_target = false;
  std::size_t sample_size = 0;
  std::vector<double> marginal1_ks;
  std::vector<double> marginal2_ks;
  std::vector<double> difference_ks;
  std::vector<double> difference_levy;
  std::vector<double> difference_distance;
  std::vector<double> difference_sd;
  double noise_level = 0.0;

  double max_marginal_ks() const;
  /// Last level below level 0, and every level within noise_level of the
  /// running minimum.
  bool difference_decreasing() const;
};

/// Iterates apply_T2 from a coupling of (nu1, nu2) for `levels` levels.
CouplingReport coupling_experiment(const EmpiricalDist& nu1, const EmpiricalDist& nu2,
                                   unsigned levels, RngStream& rng,
                                   const CouplingOptions& opts = {});

}  // namespace qsfp
