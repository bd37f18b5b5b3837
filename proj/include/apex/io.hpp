#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "apex/boundary.hpp"
#include "apex/mc.hpp"
#include "apex/model.hpp"

namespace apex {

// Fixed-significant-digit formatting: 12 digits in CSV, 17 in JSON (round-trip).
std::string format_sig(double v, int digits);

// RFC-4180 CSV: header row, CRLF line endings, quoting only where required.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string to_string() const;
};

nlohmann::json params_to_json(const ModelParams& p);
nlohmann::json spec_to_json(const OptionSpec& s);

std::string side_name(Side s);
std::string family_name(Family f);

// Boundary export: columns extremum, boundary, regime, family, side plus the
// Theorem-2.1 bound columns the CLI adds.
CsvTable boundary_to_csv(const BoundaryCurve& curve,
                         const std::vector<double>& cap_h,
                         const std::vector<double>& cap_appendix);
nlohmann::json boundary_to_json(const BoundaryCurve& curve, const ModelParams& params,
                                const std::vector<double>& cap_h,
                                const std::vector<double>& cap_appendix);

nlohmann::json estimate_to_json(const MCEstimate& e, const OptionSpec& spec,
                                const ModelParams& params, const SimConfig& cfg,
                                double closed_form);

}  // namespace apex
