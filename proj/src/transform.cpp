#include "qsfp/transform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qsfp/interpolation.hpp"
#include "qsfp/io.hpp"
#include "qsfp/parallel.hpp"
#include "qsfp/quicksort.hpp"

namespace qsfp {
namespace {

template <class Draw>
EmpiricalDist generate(std::size_t out, RngStream& rng, const std::string& tag, Draw draw) {
  if (out == 0) throw std::invalid_argument(tag + ": out = 0");
  RngStream base = rng.fork();
  std::vector<double> v(out);
  parallel_chunks(out, [&](std::size_t c, std::size_t begin, std::size_t end) {
    RngStream s = base.substream(c);
    for (std::size_t i = begin; i < end; ++i) v[i] = draw(s);
  });
  return EmpiricalDist(std::move(v), tag + "(" + base.describe() + ")");
}

}  // namespace

EmpiricalDist apply_T(const EmpiricalDist& d, RngStream& rng, std::size_t out) {
  return generate(out, rng, "T", [&d](RngStream& s) {
    const double u = s.uniform_open();
    const double z = d.resample(s);
    const double zs = d.resample(s);
    return u * z + (1.0 - u) * zs + g(u);
  });
}

EmpiricalDist apply_T0(const EmpiricalDist& d, RngStream& rng, std::size_t out) {
  return generate(out, rng, "T0", [&d](RngStream& s) {
    const double u = s.uniform_open();
    const double z = d.resample(s);
    const double zs = d.resample(s);
    return u * z + (1.0 - u) * zs;
  });
}

EmpiricalDist apply(TransformKind kind, const EmpiricalDist& d, RngStream& rng,
                    std::size_t out) {
  return kind == TransformKind::T ? apply_T(d, rng, out) : apply_T0(d, rng, out);
}

CfGrid apply_T_cf(const CfGrid& psi, const QuadratureConfig& quad) {
  const ComplexPchip interp(psi.ts(), psi.psi());
  const auto ts = psi.ts();
  std::vector<Complex> out(ts.size(), Complex(1.0, 0.0));
  QuadratureConfig half = quad;
  half.abs_tol = 0.5 * quad.abs_tol;

  parallel_for(ts.size() - 1, [&](std::size_t job) {
    const std::size_t k = job + 1;
    const double t = ts[k];
    // Knots of psi(u t) and psi((1 - u) t) that fall inside (0, 1/2).
    std::vector<double> points{0.0};
    for (std::size_t j = 1; j < k; ++j) {
      const double u = ts[j] / t;
      if (u < 0.5) points.push_back(u);
      else if (u > 0.5) points.push_back(1.0 - u);
    }
    points.push_back(0.5);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    auto f = [&](double u) {
      return interp(u * t) * interp((1.0 - u) * t) * std::polar(1.0, t * g(u));
    };
    out[k] = 2.0 * integrate(f, std::span<const double>(points), half).value;
  });
  return CfGrid({ts.begin(), ts.end()}, std::move(out));
}

CoupledSample::CoupledSample(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw std::invalid_argument("CoupledSample: empty");
  for (const auto& [x, y] : pairs_) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument("CoupledSample: non-finite value");
    }
  }
}

CoupledSample CoupledSample::independent(const EmpiricalDist& a, const EmpiricalDist& b,
                                         std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("CoupledSample::independent: n = 0");
  RngStream base = rng.fork();
  std::vector<Pair> p(n);
  parallel_chunks(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    RngStream s = base.substream(c);
    for (std::size_t i = begin; i < end; ++i) {
      const double x = a.resample(s);
      p[i] = {x, b.resample(s)};
    }
  });
  return CoupledSample(std::move(p));
}

CoupledSample CoupledSample::diagonal(const EmpiricalDist& a, std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("CoupledSample::diagonal: n = 0");
  RngStream base = rng.fork();
  std::vector<Pair> p(n);
  parallel_chunks(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    RngStream s = base.substream(c);
    for (std::size_t i = begin; i < end; ++i) {
      const double x = a.resample(s);
      p[i] = {x, x};
    }
  });
  return CoupledSample(std::move(p));
}

EmpiricalDist CoupledSample::first() const {
  std::vector<double> v(pairs_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pairs_[i].first;
  return EmpiricalDist(std::move(v), "coupled.first");
}

EmpiricalDist CoupledSample::second() const {
  std::vector<double> v(pairs_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pairs_[i].second;
  return EmpiricalDist(std::move(v), "coupled.second");
}

EmpiricalDist CoupledSample::difference() const {
  std::vector<double> v(pairs_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pairs_[i].first - pairs_[i].second;
  return EmpiricalDist(std::move(v), "coupled.difference");
}

CoupledSample apply_T2(const CoupledSample& c, RngStream& rng, std::size_t out) {
  if (out == 0) throw std::invalid_argument("apply_T2: out = 0");
  RngStream base = rng.fork();
  const auto src = c.pairs();
  std::vector<CoupledSample::Pair> p(out);
  parallel_chunks(out, [&](std::size_t ch, std::size_t begin, std::size_t end) {
    RngStream s = base.substream(ch);
    for (std::size_t i = begin; i < end; ++i) {
      const double u = s.uniform_open();
      const auto& a = src[s.index(src.size())];
      const auto& b = src[s.index(src.size())];
      const double gu = g(u);
      p[i] = {u * a.first + (1.0 - u) * b.first + gu, u * a.second + (1.0 - u) * b.second + gu};
    }
  });
  return CoupledSample(std::move(p));
}

std::vector<EmpiricalDist> iterate(TransformKind kind, const EmpiricalDist& d, std::size_t n,
                                   RngStream& rng, std::size_t out) {
  std::vector<EmpiricalDist> stages;
  stages.reserve(n + 1);
  stages.push_back(d);
  const RngStream base = rng.fork();
  for (std::size_t k = 1; k <= n; ++k) {
    RngStream stage_rng = base.substream(k);
    stages.push_back(apply(kind, stages.back(), stage_rng, out));
  }
  return stages;
}

void write_trajectory(const std::filesystem::path& dir, const std::vector<EmpiricalDist>& stages,
                      std::uint64_t seed,
                      const std::map<std::string, std::vector<double>>& metrics) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["seed"] = seed;
  manifest["stages"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < stages.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "stage_%03zu.csv", k);
    write_sample_csv(dir / name, stages[k]);
    nlohmann::ordered_json entry;
    entry["stage"] = k;
    entry["file"] = name;
    entry["sample_size"] = stages[k].size();
    entry["provenance"] = stages[k].provenance();
    for (const auto& [key, values] : metrics) {
      if (k < values.size()) entry["metrics"][key] = values[k];
    }
    manifest["stages"].push_back(entry);
  }
  std::ofstream os(dir / "manifest.json", std::ios::binary);
  if (!os) throw std::runtime_error("cannot write manifest in " + dir.string());
  os << manifest.dump(2) << '\n';
}

}  // namespace qsfp
