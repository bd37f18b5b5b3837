#include "apex/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace apex {

std::string format_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

namespace {
std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}
}  // namespace

std::string CsvTable::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(header[i]);
    }
    os << "\r\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << csv_escape(row[i]);
        }
        os << "\r\n";
    }
    return os.str();
}

std::string side_name(Side s) { return s == Side::put ? "put" : "call"; }

std::string family_name(Family f) {
    switch (f) {
        case Family::standard: return "standard";
        case Family::floating_lookback: return "floating_lookback";
        case Family::fixed_lookback: return "fixed_lookback";
    }
    return "?";
}

nlohmann::json params_to_json(const ModelParams& p) {
    return nlohmann::json{{"r", p.r},
                          {"delta", p.delta},
                          {"sigma", p.sigma},
                          {"alpha", p.alpha},
                          {"delta_prime", p.delta_prime},
                          {"admissible_side", side_name(p.admissible_side())}};
}

nlohmann::json spec_to_json(const OptionSpec& s) {
    return nlohmann::json{{"family", static_cast<int>(s.family)},
                          {"family_name", family_name(s.family)},
                          {"side", side_name(s.side)},
                          {"strike", s.strike}};
}

CsvTable boundary_to_csv(const BoundaryCurve& curve,
                         const std::vector<double>& cap_h,
                         const std::vector<double>& cap_appendix) {
    CsvTable t;
    t.header = {"extremum", "boundary", "regime", "family", "side",
                "cap_h", "cap_appendix"};
    for (std::size_t i = 0; i < curve.grid_extremum.size(); ++i) {
        t.rows.push_back({format_sig(curve.grid_extremum[i], 12),
                          format_sig(curve.grid_boundary[i], 12),
                          std::to_string(regime_index(curve.regime)),
                          std::to_string(static_cast<int>(curve.family)),
                          side_name(curve.side),
                          i < cap_h.size() ? format_sig(cap_h[i], 12) : "",
                          i < cap_appendix.size() ? format_sig(cap_appendix[i], 12) : ""});
    }
    return t;
}

nlohmann::json boundary_to_json(const BoundaryCurve& curve, const ModelParams& params,
                                const std::vector<double>& cap_h,
                                const std::vector<double>& cap_appendix) {
    nlohmann::json j;
    j["params"] = params_to_json(params);
    j["side"] = side_name(curve.side);
    j["family"] = static_cast<int>(curve.family);
    j["regime"] = regime_index(curve.regime);
    j["strike"] = curve.strike;
    j["domain_threshold"] = curve.domain_threshold;
    j["extremum"] = curve.grid_extremum;
    j["boundary"] = curve.grid_boundary;
    if (!cap_h.empty()) j["cap_h"] = cap_h;
    if (!cap_appendix.empty()) j["cap_appendix"] = cap_appendix;
    j["solver"] = {{"method", curve.info.method},
                   {"ode_rel_tol", curve.info.ode_rel_tol},
                   {"envelope_gap", curve.info.envelope_gap},
                   {"anchor_count", curve.info.anchor_count},
                   {"existence_threshold", curve.info.existence_threshold},
                   {"asymptote", curve.info.asymptote},
                   {"is_ray", curve.info.is_ray}};
    return j;
}

nlohmann::json estimate_to_json(const MCEstimate& e, const OptionSpec& spec,
                                const ModelParams& params, const SimConfig& cfg,
                                double closed_form) {
    const double z = e.std_error > 0.0 ? (e.mean - closed_form) / e.std_error : 0.0;
    return nlohmann::json{{"params", params_to_json(params)},
                          {"spec", spec_to_json(spec)},
                          {"regime", regime_index(e.regime)},
                          {"closed_form", closed_form},
                          {"mc_mean", e.mean},
                          {"mc_stderr", e.std_error},
                          {"z_score", z},
                          {"n", e.n},
                          {"dt", cfg.dt},
                          {"horizon", cfg.horizon},
                          {"seed", cfg.seed},
                          {"antithetic", cfg.antithetic},
                          {"truncation_bias_bound", e.bias_note},
                          {"capped_fraction", e.capped_fraction}};
}

}  // namespace apex
