#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ringsfwm/core.hpp"
#include "ringsfwm/errors.hpp"
#include "ringsfwm/optimize.hpp"

namespace ringsfwm {

// Everything is dimensionless with kappa_is = 1: the config supplies ratios
// and the derived ResonatorParams / PumpSpec are built on demand.
struct RunConfig {
    double kappa_p_ratio = 1.0;
    double g_p_over_opt = 1.0;
    double g_is_over_opt = 1.0;
    std::optional<double> pump_fwhm_over_kappa_p;
    int grid_n = 513;
    double grid_halfwidth_factor = 8.0;
    double tol_k = 1e-4;

    // Command-line session options; not config keys and not serialized.
    std::vector<double> ratios{1.0, 6.6, 10.0};
    bool heatmap = false;
    std::string out_dir = ".";

    bool operator==(const RunConfig& o) const {
        return kappa_p_ratio == o.kappa_p_ratio && g_p_over_opt == o.g_p_over_opt &&
               g_is_over_opt == o.g_is_over_opt &&
               pump_fwhm_over_kappa_p == o.pump_fwhm_over_kappa_p && grid_n == o.grid_n &&
               grid_halfwidth_factor == o.grid_halfwidth_factor && tol_k == o.tol_k;
    }
};

inline ResonatorParams resonator_params(const RunConfig& c) {
    return params_for_ratio(c.kappa_p_ratio, c.g_p_over_opt, c.g_is_over_opt);
}

inline std::optional<PumpSpec> pump_spec(const RunConfig& c) {
    if (!c.pump_fwhm_over_kappa_p)
        return std::nullopt;
    const double fwhm = *c.pump_fwhm_over_kappa_p * c.kappa_p_ratio;
    return PumpSpec{pump_sigma_from_fwhm(fwhm), 0.0};
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ParseError("value of " + key + " is not a number: '" + value + "'");
    return v;
}

inline int parse_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw ParseError("value of " + key + " is not an integer: '" + value + "'");
    return static_cast<int>(v);
}

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

// Key-value document: one `key = value` (or `key: value`) per line,
// `#` starts a comment, unknown keys are rejected.
inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        auto sep = line.find('=');
        if (sep == std::string::npos)
            sep = line.find(':');
        if (sep == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 'key = value' or 'key: value'");
        const std::string key = detail::trim(line.substr(0, sep));
        const std::string value = detail::trim(line.substr(sep + 1));
        if (key.empty() || value.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty key or value");
        if (!seen.insert(key).second)
            throw ParseError("duplicate key: " + key);

        if (key == "kappa_p_ratio") {
            c.kappa_p_ratio = detail::parse_double(key, value);
            if (!(c.kappa_p_ratio > 0.0))
                throw NonPositiveRate("kappa_p_ratio must be positive");
        } else if (key == "g_p_over_opt") {
            c.g_p_over_opt = detail::parse_double(key, value);
            if (!(c.g_p_over_opt > 0.0))
                throw NonPositiveRate("g_p_over_opt must be positive");
        } else if (key == "g_is_over_opt") {
            c.g_is_over_opt = detail::parse_double(key, value);
            if (!(c.g_is_over_opt > 0.0))
                throw NonPositiveRate("g_is_over_opt must be positive");
        } else if (key == "pump_fwhm_over_kappa_p") {
            const double v = detail::parse_double(key, value);
            if (!(v > 0.0))
                throw NonPositiveRate("pump_fwhm_over_kappa_p must be positive");
            c.pump_fwhm_over_kappa_p = v;
        } else if (key == "grid_n") {
            c.grid_n = detail::parse_int(key, value);
            if (c.grid_n < 3 || c.grid_n % 2 == 0)
                throw ParseError("grid_n must be odd and at least 3");
        } else if (key == "grid_halfwidth_factor") {
            c.grid_halfwidth_factor = detail::parse_double(key, value);
            if (!(c.grid_halfwidth_factor > 0.0))
                throw NonPositiveRate("grid_halfwidth_factor must be positive");
        } else if (key == "tol_k") {
            c.tol_k = detail::parse_double(key, value);
            if (!(c.tol_k > 0.0))
                throw NonPositiveRate("tol_k must be positive");
        } else {
            throw UnknownKey("unknown config key: " + key);
        }
    }
    return c;
}

inline std::string serialize_config(const RunConfig& c) {
    std::string out;
    out += "kappa_p_ratio = " + detail::format_g17(c.kappa_p_ratio) + "\n";
    out += "g_p_over_opt = " + detail::format_g17(c.g_p_over_opt) + "\n";
    out += "g_is_over_opt = " + detail::format_g17(c.g_is_over_opt) + "\n";
    if (c.pump_fwhm_over_kappa_p)
        out += "pump_fwhm_over_kappa_p = " + detail::format_g17(*c.pump_fwhm_over_kappa_p) +
               "\n";
    out += "grid_n = " + std::to_string(c.grid_n) + "\n";
    out += "grid_halfwidth_factor = " + detail::format_g17(c.grid_halfwidth_factor) + "\n";
    out += "tol_k = " + detail::format_g17(c.tol_k) + "\n";
    return out;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace ringsfwm
