#include "qsfp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsfp {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
  return is;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_sample_csv(std::ostream& os, const EmpiricalDist& d) {
  for (double v : d.values()) os << format_double(v) << '\n';
}

void write_sample_csv(const std::filesystem::path& path, const EmpiricalDist& d) {
  auto os = open_out(path);
  write_sample_csv(os, d);
}

EmpiricalDist read_sample_csv(std::istream& is, std::string provenance) {
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    values.push_back(parse_double(t));
  }
  return EmpiricalDist(std::move(values), std::move(provenance));
}

EmpiricalDist read_sample_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_sample_csv(is, path.string());
}

void write_cf_csv(std::ostream& os, const CfGrid& g) {
  os << "t,re,im\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << format_double(g.t(i)) << ',' << format_double(g[i].real()) << ','
       << format_double(g[i].imag()) << '\n';
  }
}

void write_cf_csv(const std::filesystem::path& path, const CfGrid& g) {
  auto os = open_out(path);
  write_cf_csv(os, g);
}

CfGrid read_cf_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "t,re,im") {
    throw std::invalid_argument("CF csv: expected header 't,re,im'");
  }
  std::vector<double> ts;
  std::vector<Complex> psi;
  while (std::getline(is, line)) {
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto c1 = row.find(',');
    const auto c2 = row.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
      throw std::invalid_argument("CF csv: expected three columns");
    }
    ts.push_back(parse_double(row.substr(0, c1)));
    psi.emplace_back(parse_double(row.substr(c1 + 1, c2 - c1 - 1)),
                     parse_double(row.substr(c2 + 1)));
  }
  return CfGrid(std::move(ts), std::move(psi));
}

CfGrid read_cf_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_cf_csv(is);
}

void write_grid_csv(const std::filesystem::path& path, const GridFunction& f) {
  auto os = open_out(path);
  os << "t,re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << format_double(f.ts[i]) << ',' << format_double(f.values[i].real()) << ','
       << format_double(f.values[i].imag()) << '\n';
  }
}

}  // namespace qsfp
