#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "deephole/lattice.hpp"
#include "deephole/verify.hpp"

// JSON bindings for the report types plus CSV formatting helpers. Finite
// doubles round-trip exactly through nlohmann's shortest-representation
// encoder; infinities (the no-ratio sentinel in CertReport) are encoded as
// the strings "inf" / "-inf" because JSON has no literal for them.

namespace deephole {

inline nlohmann::json json_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline double real_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("real_from_json: unrecognized string value '" + s + "'");
    }
    return j.get<double>();
}

/// Full-precision decimal rendering (17 significant digits), the CSV cell
/// format.
inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void to_json(nlohmann::json& j, const IndexPair& p) { j = {p.k, p.l}; }

inline void from_json(const nlohmann::json& j, IndexPair& p) {
    p.k = j.at(0).get<std::int64_t>();
    p.l = j.at(1).get<std::int64_t>();
}

inline void to_json(nlohmann::json& j, const Vec2& v) { j = {v.x, v.y}; }

inline void from_json(const nlohmann::json& j, Vec2& v) {
    v.x = j.at(0).get<double>();
    v.y = j.at(1).get<double>();
}

inline void to_json(nlohmann::json& j, const LatticeParams& p) {
    j = nlohmann::json{{"x", p.x}, {"y", p.y}};
}

inline void from_json(const nlohmann::json& j, LatticeParams& p) {
    j.at("x").get_to(p.x);
    j.at("y").get_to(p.y);
}

inline void to_json(nlohmann::json& j, const Shell& s) {
    j = nlohmann::json{{"four_r_squared", s.four_r_squared}, {"indices", s.indices}};
}

inline void from_json(const nlohmann::json& j, Shell& s) {
    j.at("four_r_squared").get_to(s.four_r_squared);
    j.at("indices").get_to(s.indices);
}

inline void to_json(nlohmann::json& j, const PerturbationSample& s) {
    j = nlohmann::json{{"params", s.params}, {"d", s.d}};
}

inline void from_json(const nlohmann::json& j, PerturbationSample& s) {
    j.at("params").get_to(s.params);
    j.at("d").get_to(s.d);
}

inline void to_json(nlohmann::json& j, const CertReport& r) {
    j = nlohmann::json{{"shell_key", r.shell_key},
                       {"kind", r.kind},
                       {"sample_count", r.sample_count},
                       {"min_ratio", json_real(r.min_ratio)},
                       {"max_ratio", json_real(r.max_ratio)},
                       {"failures", r.failures},
                       {"d_range", {r.d_min, r.d_max}},
                       {"zero_d_samples", r.zero_d_samples},
                       {"positivity_pass", r.positivity_pass},
                       {"unit_constant_pass", r.unit_constant_pass}};
}

inline void from_json(const nlohmann::json& j, CertReport& r) {
    j.at("shell_key").get_to(r.shell_key);
    j.at("kind").get_to(r.kind);
    j.at("sample_count").get_to(r.sample_count);
    r.min_ratio = real_from_json(j.at("min_ratio"));
    r.max_ratio = real_from_json(j.at("max_ratio"));
    j.at("failures").get_to(r.failures);
    r.d_min = j.at("d_range").at(0).get<double>();
    r.d_max = j.at("d_range").at(1).get<double>();
    j.at("zero_d_samples").get_to(r.zero_d_samples);
    j.at("positivity_pass").get_to(r.positivity_pass);
    j.at("unit_constant_pass").get_to(r.unit_constant_pass);
}

inline void to_json(nlohmann::json& j, const SpectrumReport& r) {
    j = nlohmann::json{{"kind", r.kind},
                       {"search_range", r.search_range},
                       {"min_eigenvalue", r.min_eigenvalue},
                       {"argmin_pairs", r.argmin_pairs},
                       {"growth_certified", r.growth_certified},
                       {"boundary_min_eigenvalue", r.boundary_min_eigenvalue},
                       {"relaxed_min", r.relaxed_min},
                       {"relaxed_argmin", r.relaxed_argmin},
                       {"candidate_pairs", r.candidate_pairs}};
}

inline void from_json(const nlohmann::json& j, SpectrumReport& r) {
    j.at("kind").get_to(r.kind);
    j.at("search_range").get_to(r.search_range);
    j.at("min_eigenvalue").get_to(r.min_eigenvalue);
    j.at("argmin_pairs").get_to(r.argmin_pairs);
    j.at("growth_certified").get_to(r.growth_certified);
    j.at("boundary_min_eigenvalue").get_to(r.boundary_min_eigenvalue);
    j.at("relaxed_min").get_to(r.relaxed_min);
    j.at("relaxed_argmin").get_to(r.relaxed_argmin);
    j.at("candidate_pairs").get_to(r.candidate_pairs);
}

inline void to_json(nlohmann::json& j, const CriticalPointReport& r) {
    j = nlohmann::json{{"kind", r.kind},
                       {"k_range", r.k_range},
                       {"max_analytic_norm", r.max_analytic_norm},
                       {"max_fd_norm", r.max_fd_norm},
                       {"violations", r.violations},
                       {"pass", r.pass}};
}

inline void from_json(const nlohmann::json& j, CriticalPointReport& r) {
    j.at("kind").get_to(r.kind);
    j.at("k_range").get_to(r.k_range);
    j.at("max_analytic_norm").get_to(r.max_analytic_norm);
    j.at("max_fd_norm").get_to(r.max_fd_norm);
    j.at("violations").get_to(r.violations);
    j.at("pass").get_to(r.pass);
}

}  // namespace deephole
