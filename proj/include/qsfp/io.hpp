#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qsfp/dist.hpp"

namespace qsfp {

/// Shortest-safe decimal form: 17 significant digits, round-trips exactly.
std::string format_double(double v);
double parse_double(std::string_view text);

// EmpiricalDist: one value per line, no header.
void write_sample_csv(std::ostream& os, const EmpiricalDist& d);
void write_sample_csv(const std::filesystem::path& path, const EmpiricalDist& d);
EmpiricalDist read_sample_csv(std::istream& is, std::string provenance = {});
EmpiricalDist read_sample_csv(const std::filesystem::path& path);

// CfGrid: header "t,re,im" then one row per grid point.
void write_cf_csv(std::ostream& os, const CfGrid& g);
void write_cf_csv(const std::filesystem::path& path, const CfGrid& g);
CfGrid read_cf_csv(std::istream& is);
CfGrid read_cf_csv(const std::filesystem::path& path);

/// Same layout as the CF format, for derived grids (r, b, c(t), ...).
void write_grid_csv(const std::filesystem::path& path, const GridFunction& f);

}  // namespace qsfp
