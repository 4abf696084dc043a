#pragma once

#include <filesystem>

#include <json.hpp>

#include "qsfp/analysis.hpp"
#include "qsfp/attraction.hpp"
#include "qsfp/fixed_point.hpp"

namespace qsfp {

using Json = nlohmann::ordered_json;

Json to_json(const CauchyParams& p);
Json to_json(const Complex& z);
Json to_json(const FixedPointReport& r);
Json to_json(const Theorem1Report& r);
Json to_json(const Corollary2Report& r);
Json to_json(const SlopeFit& f);
Json to_json(const SlopeEstimate& s);
Json to_json(const JEstimate& j);
Json to_json(const ChernoffReport& r);
Json to_json(const SummaryStats& s);
Json to_json(const AttractionReport& r);
Json to_json(const CouplingReport& r);

/// Pretty-printed with a trailing newline; creates parent directories.
void write_json(const std::filesystem::path& path, const Json& j);

/// level, ks, levy, w_mean, w_sd, l_n_mean, l_n_max per stage.
void write_attraction_csv(const std::filesystem::path& path, const AttractionReport& r);
/// Histogram of the L_n draws at every level: level, bin_lo, bin_hi, count.
void write_l_n_histogram_csv(const std::filesystem::path& path, const AttractionReport& r,
                             std::size_t bins = 50);

}  // namespace qsfp
