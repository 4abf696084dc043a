#include "qsfp/attraction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "qsfp/parallel.hpp"
#include "qsfp/transform.hpp"

namespace qsfp {

WeightVector split_weights(unsigned n, RngStream& rng) {
  if (n > kMaxSplitLevel) {
    throw std::invalid_argument("split_weights: level " + std::to_string(n) + " exceeds " +
                                std::to_string(kMaxSplitLevel));
  }
  WeightVector w{n, {1.0}};
  w.weights.reserve(std::size_t{1} << n);
  std::vector<double> next;
  for (unsigned level = 0; level < n; ++level) {
    next.resize(2 * w.weights.size());
    for (std::size_t i = 0; i < w.weights.size(); ++i) {
      const double u = rng.uniform_open();
      next[2 * i] = w.weights[i] * u;
      next[2 * i + 1] = w.weights[i] * (1.0 - u);
    }
    std::swap(w.weights, next);
  }
  return w;
}

double max_weight(const WeightVector& w) {
  return *std::max_element(w.weights.begin(), w.weights.end());
}

double squared_weight_sum(const WeightVector& w) {
  double s = 0.0;
  for (double v : w.weights) s += v * v;
  return s;
}

double sample_max_weight(unsigned n, RngStream& rng) {
  std::vector<std::pair<double, unsigned>> stack{{1.0, 0u}};
  double best = 0.0;
  while (!stack.empty()) {
    const auto [w, depth] = stack.back();
    stack.pop_back();
    if (w <= best) continue;
    if (depth == n) {
      best = w;
      continue;
    }
    const double u = rng.uniform_open();
    const double a = w * u, b = w * (1.0 - u);
    // Larger child on top so good lower bounds are found first.
    stack.emplace_back(std::min(a, b), depth + 1);
    stack.emplace_back(std::max(a, b), depth + 1);
  }
  return best;
}

bool max_weight_reaches(unsigned n, double threshold, RngStream& rng) {
  std::vector<std::pair<double, unsigned>> stack{{1.0, 0u}};
  while (!stack.empty()) {
    const auto [w, depth] = stack.back();
    stack.pop_back();
    if (w < threshold) continue;
    if (depth == n) return true;
    const double u = rng.uniform_open();
    stack.emplace_back(w * u, depth + 1);
    stack.emplace_back(w * (1.0 - u), depth + 1);
  }
  return false;
}

ChernoffBound chernoff_bound(unsigned n, double x) {
  if (n == 0) throw std::invalid_argument("chernoff_bound: n must be >= 1");
  if (!(x > 0.0)) throw std::invalid_argument("chernoff_bound: x must be > 0");
  const double nn = static_cast<double>(n);
  ChernoffBound b;
  b.n = n;
  b.x = x;
  b.value = std::exp(-(nn * (std::log(nn) - std::log(2.0 * std::numbers::e * x)) + x));
  b.vacuous = b.value >= 1.0;
  b.outside_validity = nn < x;
  return b;
}

ChernoffReport verify_chernoff(unsigned n, double x, std::size_t reps, RngStream& rng) {
  if (reps < 1000) throw std::invalid_argument("verify_chernoff: reps < 1000");
  ChernoffReport rep;
  rep.bound = chernoff_bound(n, x);
  rep.reps = reps;
  const double threshold = std::exp(-x);
  RngStream base = rng.fork();
  std::vector<std::size_t> hits(chunk_count(reps, 1024), 0);
  parallel_chunks(
      reps,
      [&](std::size_t c, std::size_t begin, std::size_t end) {
        RngStream s = base.substream(c);
        for (std::size_t i = begin; i < end; ++i) hits[c] += max_weight_reaches(n, threshold, s);
      },
      1024);
  for (std::size_t h : hits) rep.hits += h;
  rep.frequency = static_cast<double>(rep.hits) / static_cast<double>(reps);
  const double p = std::min(rep.bound.value, 1.0);
  rep.slack = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  rep.passed = rep.bound.vacuous || rep.frequency <= rep.bound.value + rep.slack;
  return rep;
}

SourceSpec SourceSpec::cauchy(const CauchyParams& p) {
  p.validate();
  SourceSpec s;
  s.kind_ = Kind::Cauchy;
  s.cauchy_ = p;
  return s;
}

SourceSpec SourceSpec::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential source: rate must be > 0");
  SourceSpec s;
  s.kind_ = Kind::Exponential;
  s.rate_ = rate;
  return s;
}

SourceSpec SourceSpec::symmetric_pareto() {
  SourceSpec s;
  s.kind_ = Kind::SymmetricPareto;
  return s;
}

SourceSpec SourceSpec::empirical(EmpiricalDist d) {
  SourceSpec s;
  s.kind_ = Kind::Empirical;
  s.empirical_ = std::move(d);
  return s;
}

std::string SourceSpec::name() const {
  switch (kind_) {
    case Kind::Cauchy:
      return "cauchy(" + std::to_string(cauchy_.m) + "," + std::to_string(cauchy_.sigma) + ")";
    case Kind::Exponential:
      return "exponential(" + std::to_string(rate_) + ")";
    case Kind::SymmetricPareto:
      return "symmetric-pareto";
    case Kind::Empirical:
      return "empirical(" + empirical_->provenance() + ")";
  }
  return {};
}

double SourceSpec::draw(RngStream& rng) const {
  switch (kind_) {
    case Kind::Cauchy:
      return cauchy_.m + cauchy_.sigma * std::tan(std::numbers::pi * (rng.uniform_open() - 0.5));
    case Kind::Exponential:
      return -std::log(rng.uniform_open()) / rate_;
    case Kind::SymmetricPareto: {
      const double mag = 1.0 / rng.uniform_open();
      return (rng.next_u64() >> 63) ? mag : -mag;
    }
    case Kind::Empirical:
      return empirical_->resample(rng);
  }
  return 0.0;
}

EmpiricalDist SourceSpec::sample(std::size_t n, RngStream& rng) const {
  if (n == 0) throw std::invalid_argument("SourceSpec::sample: n = 0");
  RngStream base = rng.fork();
  std::vector<double> v(n);
  parallel_chunks(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    RngStream s = base.substream(c);
    for (std::size_t i = begin; i < end; ++i) v[i] = draw(s);
  });
  return EmpiricalDist(std::move(v), name() + "(" + base.describe() + ")");
}

std::optional<CauchyParams> SourceSpec::known_target() const {
  switch (kind_) {
    case Kind::Cauchy:
      return cauchy_;
    case Kind::Exponential:
      return CauchyParams{1.0 / rate_, 0.0};
    case Kind::SymmetricPareto:
      return CauchyParams{0.0, std::numbers::pi / 2.0};
    case Kind::Empirical:
      return std::nullopt;
  }
  return std::nullopt;
}

SummaryStats summarize(std::span<const double> v) {
  SummaryStats s;
  if (v.empty()) return s;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  s.mean = mean;
  s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

bool AttractionReport::ks_nonincreasing() const {
  double best = 1.0;
  for (double k : ks_by_stage) {
    if (k > best + noise_level) return false;
    best = std::min(best, k);
  }
  return true;
}

AttractionReport t0_attraction(const SourceSpec& source, std::optional<CauchyParams> target,
                               unsigned max_level, std::size_t reps, RngStream& rng,
                               const AttractionOptions& opts) {
  if (max_level > kMaxSplitLevel) {
    throw std::invalid_argument("t0_attraction: max_level exceeds " +
                                std::to_string(kMaxSplitLevel));
  }
  if (reps == 0) throw std::invalid_argument("t0_attraction: reps = 0");
  RngStream base = rng.fork();
  AttractionReport rep;
  rep.source = source.name();
  rep.reps = reps;
  if (target) {
    target->validate();
    rep.target = *target;
  } else {
    RngStream s_est = base.substream(0);
    const EmpiricalDist d = source.sample(opts.estimate_sample, s_est);
    const SlopeEstimate fit = estimate_beta(empirical_cf(d, make_grid(opts.grid)), opts.slope);
    rep.target = fit.cauchy();
    rep.target_estimated = true;
    rep.target_fit = fit;
  }
  rep.noise_level = ks_noise_level(reps, reps);
  rep.familywise_noise_level = ks_noise_level(reps, reps, 1e-3 / (max_level + 1.0));

  for (unsigned level = 0; level <= max_level; ++level) {
    const RngStream lv = base.substream(level + 1);
    const RngStream draws = lv.substream(0);
    std::vector<double> w(reps), ln(reps);
    parallel_for(reps, [&](std::size_t r) {
      RngStream s = draws.substream(r);
      const WeightVector v = split_weights(level, s);
      double sum = 0.0;
      for (double vi : v.weights) sum += vi * source.draw(s);
      w[r] = sum;
      ln[r] = max_weight(v);
    });
    RngStream s_ref = lv.substream(1);
    const EmpiricalDist wn(w, "W_" + std::to_string(level));
    const EmpiricalDist ref = cauchy_sample(rep.target, reps, s_ref);
    rep.ks_by_stage.push_back(ks_distance(wn, ref));
    rep.levy_by_stage.push_back(levy_distance(wn, ref));
    rep.w_stats.push_back(summarize(w));
    rep.l_n_stats.push_back(summarize(ln));
    rep.l_n_draws.push_back(std::move(ln));
  }
  return rep;
}

double CouplingReport::max_marginal_ks() const {
  double m = 0.0;
  for (double v : marginal1_ks) m = std::max(m, v);
  for (double v : marginal2_ks) m = std::max(m, v);
  return m;
}

bool CouplingReport::difference_decreasing() const {
  if (difference_distance.empty()) return false;
  double best = difference_distance.front();
  for (double d : difference_distance) {
    if (d > best + noise_level) return false;
    best = std::min(best, d);
  }
  return difference_distance.back() < difference_distance.front() ||
         difference_distance.front() <= noise_level;
}

CouplingReport coupling_experiment(const EmpiricalDist& nu1, const EmpiricalDist& nu2,
                                   unsigned levels, RngStream& rng,
                                   const CouplingOptions& opts) {
  RngStream base = rng.fork();
  const std::size_t n = opts.sample_size ? opts.sample_size : std::min(nu1.size(), nu2.size());
  RngStream s0 = base.substream(0);
  CoupledSample c = opts.initial == InitialCoupling::Independent
                        ? CoupledSample::independent(nu1, nu2, n, s0)
                        : CoupledSample::diagonal(nu1, n, s0);

  CouplingReport rep;
  rep.sample_size = n;
  rep.noise_level = ks_noise_level(n, n);
  const SlopeEstimate fit =
      estimate_beta(empirical_cf(c.difference(), make_grid(opts.grid)), opts.slope);
  rep.target_beta = fit.beta();
  const double sigma = -fit.beta_re <= opts.degenerate_tolerance ? 0.0 : -fit.beta_re;
  rep.target = {fit.beta_im, sigma};
  rep.degenerate_target = sigma == 0.0;

  for (unsigned level = 0; level <= levels; ++level) {
    const RngStream lv = base.substream(level + 1);
    if (level > 0) {
      RngStream s = lv.substream(0);
      c = apply_T2(c, s, n);
    }
    RngStream s_ref = lv.substream(1);
    const EmpiricalDist diff = c.difference();
    const EmpiricalDist ref = cauchy_sample(rep.target, n, s_ref);
    rep.marginal1_ks.push_back(ks_distance(c.first(), nu1));
    rep.marginal2_ks.push_back(ks_distance(c.second(), nu2));
    rep.difference_ks.push_back(ks_distance(diff, ref));
    rep.difference_levy.push_back(levy_distance(diff, ref));
    rep.difference_distance.push_back(rep.degenerate_target ? rep.difference_levy.back()
                                                            : rep.difference_ks.back());
    rep.difference_sd.push_back(diff.stddev());
  }
  return rep;
}

}  // namespace qsfp
