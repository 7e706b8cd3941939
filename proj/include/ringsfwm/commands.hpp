#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringsfwm/biphoton.hpp"
#include "ringsfwm/config.hpp"
#include "ringsfwm/core.hpp"
#include "ringsfwm/errors.hpp"
#include "ringsfwm/optimize.hpp"
#include "ringsfwm/schmidt.hpp"
#include "ringsfwm/transfer.hpp"

namespace ringsfwm {

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out)
        throw IoError("write failed: " + path);
}

inline std::string ensure_out_dir(const RunConfig& c) {
    std::error_code ec;
    std::filesystem::create_directories(c.out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory: " + c.out_dir);
    return c.out_dir;
}

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// Keeps JSON output readable: values pass through 12-significant-digit text.
inline double json_round(double v) {
    return std::strtod(format_g12(v).c_str(), nullptr);
}

inline std::array<int, 3> viridis(double v) {
    static constexpr double anchors[5][3] = {{68, 1, 84},
                                             {59, 82, 139},
                                             {33, 145, 140},
                                             {94, 201, 98},
                                             {253, 231, 37}};
    v = std::min(std::max(v, 0.0), 1.0);
    const double t = v * 4.0;
    const int i = std::min(static_cast<int>(t), 3);
    const double f = t - i;
    std::array<int, 3> rgb{};
    for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<int>(anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c]));
    return rgb;
}

// Small standalone SVG of a normalized intensity matrix, subsampled so the
// file stays light at high grid resolutions.
inline void write_heatmap(const std::string& path, const Eigen::MatrixXd& p,
                          const std::string& title) {
    const int n_i = static_cast<int>(p.rows());
    const int n_s = static_cast<int>(p.cols());
    const int stride = std::max(1, (std::max(n_i, n_s) + 128) / 129);
    const int mi = (n_i + stride - 1) / stride;
    const int ms = (n_s + stride - 1) / stride;
    const int cell = 4, margin = 24;
    const int w = ms * cell + 2 * margin, h = mi * cell + 2 * margin;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + std::to_string(w) +
           " " + std::to_string(h) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#101018\"/>\n";
    svg += "<text x=\"" + std::to_string(margin) + "\" y=\"16\" fill=\"#d0d0d8\" "
           "font-family=\"monospace\" font-size=\"11\">" + title + "</text>\n";
    for (int j = 0; j < n_i; j += stride) {
        for (int k = 0; k < n_s; k += stride) {
            const auto rgb = viridis(p(j, k));
            const int x = margin + (k / stride) * cell;
            const int y = margin + (mi - 1 - j / stride) * cell; // idler axis upward
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                   "\" width=\"" + std::to_string(cell) + "\" height=\"" +
                   std::to_string(cell) + "\" fill=\"rgb(" + std::to_string(rgb[0]) + "," +
                   std::to_string(rgb[1]) + "," + std::to_string(rgb[2]) + ")\"/>\n";
        }
    }
    svg += "</svg>\n";
    write_file(path, svg);
}

struct DelayCurves {
    FrequencyGrid grid;
    // relative delay T/T(0) at 0.9, 1.0 and 1.1 times the optimal coupling
    std::array<std::vector<double>, 3> rel;
};

inline DelayCurves delay_curves(const RunConfig& c) {
    DelayCurves out;
    const double kp = c.kappa_p_ratio;
    out.grid = make_grid(0.0, kp, c.grid_n);
    const double gopt = optimal_coupling(kp);
    const double factors[3] = {0.9, 1.0, 1.1};
    for (int fi = 0; fi < 3; ++fi) {
        ResonatorParams p;
        p.kappa_p = kp;
        p.kappa_is = 1.0;
        p.g_p = factors[fi] * gopt;
        p.g_is = optimal_coupling(1.0);
        const auto tr = trace(validate_params(p), out.grid, Channel::pump);
        auto delay = delay_function(tr);
        const double t0 = delay[out.grid.center_index()];
        for (double& v : delay)
            v /= t0;
        out.rel[fi] = std::move(delay);
    }
    return out;
}

// Largest |T/T(0) - 1| over |detuning| <= window.
inline double max_rel_deviation(const DelayCurves& dc, int curve, double window) {
    double dev = 0.0;
    for (int i = 0; i < dc.grid.n_points; ++i)
        if (std::abs(dc.grid.points[i]) <= window)
            dev = std::max(dev, std::abs(dc.rel[curve][i] - 1.0));
    return dev;
}

} // namespace detail

// Three relative-delay curves (couplings 0.9, 1.0, 1.1 x optimal) over
// detunings within one pump linewidth, written as a 4-column table.
inline std::vector<std::string> cmd_delay(const RunConfig& c) {
    const std::string dir = detail::ensure_out_dir(c);
    const auto dc = detail::delay_curves(c);
    const double kp = c.kappa_p_ratio;

    std::string tsv = "# detuning/kappa_p\trel_delay_g0.9\trel_delay_g1.0\trel_delay_g1.1\n";
    for (int i = 0; i < dc.grid.n_points; ++i) {
        tsv += detail::format_g12(dc.grid.points[i] / kp);
        for (int fi = 0; fi < 3; ++fi)
            tsv += "\t" + detail::format_g12(dc.rel[fi][i]);
        tsv += "\n";
    }
    const std::string path = detail::join_path(dir, "delay.tsv");
    detail::write_file(path, tsv);
    return {path};
}

namespace detail {

inline std::vector<std::string> run_jsa(const RunConfig& c, const PumpSpec& pump,
                                        const std::string& suffix) {
    const std::string dir = ensure_out_dir(c);
    const ResonatorParams params = resonator_params(c);
    const double factor = c.grid_halfwidth_factor;
    const auto gi = make_grid(params.omega0_i, factor * params.kappa_is, c.grid_n);
    const auto gs = make_grid(params.omega0_s, factor * params.kappa_is, c.grid_n);
    const JsaGrid amp = jsa(params, pump, gi, gs, factor);

    Eigen::MatrixXd p = jsi(amp);
    Eigen::Index peak_i = 0, peak_s = 0;
    const double peak = p.maxCoeff(&peak_i, &peak_s);
    p /= peak;

    std::string tsv = "# delta_i/kappa_is\tdelta_s/kappa_is\tjsi_over_peak\n";
    for (int j = 0; j < gi.n_points; ++j)
        for (int k = 0; k < gs.n_points; ++k)
            tsv += format_g12(gi.points[j]) + "\t" + format_g12(gs.points[k]) + "\t" +
                   format_g12(p(j, k)) + "\n";
    const std::string tsv_path = join_path(dir, "jsi" + suffix + ".tsv");
    write_file(tsv_path, tsv);

    const double k_grid = kernel_schmidt_number(weighted_kernel(amp));
    nlohmann::ordered_json meta;
    meta["kappa_p_ratio"] = json_round(c.kappa_p_ratio);
    meta["g_p_over_opt"] = json_round(c.g_p_over_opt);
    meta["g_is_over_opt"] = json_round(c.g_is_over_opt);
    meta["pump_fwhm_over_kappa_p"] =
        json_round(pump_fwhm_from_sigma(pump.sigma) / params.kappa_p);
    meta["pump_sigma"] = json_round(pump.sigma);
    meta["grid_n"] = c.grid_n;
    meta["grid_halfwidth_factor"] = json_round(factor);
    meta["normalization"] = "unit peak";
    meta["peak"] = {{"index_i", static_cast<int>(peak_i)},
                    {"index_s", static_cast<int>(peak_s)},
                    {"delta_i", json_round(gi.points[peak_i])},
                    {"delta_s", json_round(gs.points[peak_s])}};
    meta["jsi_correlation"] = json_round(jsi_correlation(amp));
    meta["schmidt_number_at_grid"] = json_round(k_grid);
    const std::string meta_path = join_path(dir, "jsi" + suffix + ".meta.json");
    write_file(meta_path, meta.dump(2) + "\n");

    std::vector<std::string> files{tsv_path, meta_path};
    if (c.heatmap) {
        const std::string svg_path = join_path(dir, "jsi" + suffix + ".svg");
        write_heatmap(svg_path, p,
                      "JSI, ratio " + format_g12(c.kappa_p_ratio) + ", pump FWHM " +
                          format_g12(pump_fwhm_from_sigma(pump.sigma) / params.kappa_p) +
                          " kappa_p");
        files.push_back(svg_path);
    }
    return files;
}

} // namespace detail

// Joint spectral intensity on the configured grid. Without an explicit pump
// width the pump is first optimized for minimal Schmidt number.
inline std::vector<std::string> cmd_jsa(const RunConfig& c) {
    PumpSpec pump{};
    if (const auto p = pump_spec(c)) {
        pump = *p;
    } else {
        const auto rec = optimize_pump_width_auto(resonator_params(c), c.tol_k).record;
        pump = PumpSpec{rec.sigma_opt, 0.0};
    }
    return detail::run_jsa(c, pump, "");
}

namespace detail {

struct OptimizeRow {
    OptimizationRecord record;
    std::string status;
};

inline std::vector<OptimizeRow> optimize_rows(const RunConfig& c,
                                              const std::vector<double>& ratios) {
    std::vector<OptimizeRow> rows;
    rows.reserve(ratios.size());
    for (double ratio : ratios) {
        OptimizeRow row;
        try {
            const auto ao = optimize_pump_width_auto(
                params_for_ratio(ratio, c.g_p_over_opt, c.g_is_over_opt), c.tol_k);
            row.record = ao.record;
            row.status = ao.plateau_edge ? "plateau" : "ok";
        } catch (const Error& e) {
            row.record.ratio = ratio;
            row.record.k_min = std::numeric_limits<double>::quiet_NaN();
            row.record.purity = std::numeric_limits<double>::quiet_NaN();
            row.record.converged = false;
            row.status = std::string("error: ") + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string optimize_table(const std::vector<OptimizeRow>& rows) {
    std::string tsv =
        "# ratio\tfwhm_over_kappa_p\tk_min\tpurity\tn_evals\tconverged\tstatus\n";
    for (const auto& row : rows) {
        const auto& r = row.record;
        tsv += format_g12(r.ratio) + "\t" + format_g12(r.fwhm_over_kappa_p) + "\t" +
               format_g12(r.k_min) + "\t" + format_g12(r.purity) + "\t" +
               std::to_string(r.n_evals) + "\t" + (r.converged ? "true" : "false") + "\t" +
               row.status + "\n";
    }
    return tsv;
}

} // namespace detail

// Pump-width optimization for each requested ratio; failures are captured
// per row in the status column rather than aborting the table.
inline std::vector<std::string> cmd_optimize(const RunConfig& c) {
    if (c.ratios.empty())
        throw ConfigError("ratio list is empty");
    const std::string dir = detail::ensure_out_dir(c);
    const auto rows = detail::optimize_rows(c, c.ratios);
    const std::string path = detail::join_path(dir, "optimize.tsv");
    detail::write_file(path, detail::optimize_table(rows));
    return {path};
}

struct ReproduceOutcome {
    std::vector<std::string> files;
    bool all_pass = false;
};

// Umbrella run: delay curves, pump optimization at the three reference
// ratios, and the two reference JSIs, summarized in report.json with a
// pass/fail verdict per comparison.
inline ReproduceOutcome cmd_reproduce(const RunConfig& c) {
    ReproduceOutcome out;
    const std::string dir = detail::ensure_out_dir(c);

    // Delay curves plus a flatness check: the optimally coupled curve must
    // deviate least from its center value in the plateau window.
    const auto delay_files = cmd_delay(c);
    out.files.insert(out.files.end(), delay_files.begin(), delay_files.end());
    const auto dc = detail::delay_curves(c);
    const double window = 0.15 * c.kappa_p_ratio;
    const double dev_lo = detail::max_rel_deviation(dc, 0, window);
    const double dev_opt = detail::max_rel_deviation(dc, 1, window);
    const double dev_hi = detail::max_rel_deviation(dc, 2, window);
    const bool delay_pass = dev_opt < dev_lo && dev_opt < dev_hi;

    // Schmidt-number targets for the three reference ratios.
    const std::vector<double> ratios{1.0, 6.6, 10.0};
    const auto rows = detail::optimize_rows(c, ratios);
    const std::string opt_path = detail::join_path(dir, "optimize.tsv");
    detail::write_file(opt_path, detail::optimize_table(rows));
    out.files.push_back(opt_path);

    struct Target {
        double ratio, k, tol;
    };
    const Target targets[3] = {{1.0, 1.07, 0.01}, {6.6, 1.0003, 1e-4}, {10.0, 1.00006, 2e-5}};
    nlohmann::ordered_json comparisons = nlohmann::ordered_json::array();
    bool k_pass_all = true;
    for (int i = 0; i < 3; ++i) {
        const auto& row = rows[i];
        const bool ok = row.record.converged &&
                        std::abs(row.record.k_min - targets[i].k) <= targets[i].tol;
        k_pass_all = k_pass_all && ok;
        comparisons.push_back({{"ratio", detail::json_round(targets[i].ratio)},
                               {"computed_k", detail::json_round(row.record.k_min)},
                               {"target_k", detail::json_round(targets[i].k)},
                               {"tolerance", detail::json_round(targets[i].tol)},
                               {"fwhm_over_kappa_p",
                                detail::json_round(row.record.fwhm_over_kappa_p)},
                               {"status", row.status},
                               {"pass", ok}});
    }

    // Reference JSIs at ratios 1 and 10 with their optimized pump widths.
    for (int idx : {0, 2}) {
        const auto& row = rows[idx];
        if (!row.record.converged)
            continue;
        RunConfig cj = c;
        cj.kappa_p_ratio = row.record.ratio;
        const std::string suffix = "_r" + detail::format_g12(row.record.ratio);
        const auto jsa_files =
            detail::run_jsa(cj, PumpSpec{row.record.sigma_opt, 0.0}, suffix);
        out.files.insert(out.files.end(), jsa_files.begin(), jsa_files.end());
    }

    out.all_pass = delay_pass && k_pass_all;

    nlohmann::ordered_json report;
    report["delay_flatness"] = {{"window_over_kappa_p", 0.15},
                                {"max_dev_g0.9", detail::json_round(dev_lo)},
                                {"max_dev_g1.0", detail::json_round(dev_opt)},
                                {"max_dev_g1.1", detail::json_round(dev_hi)},
                                {"pass", delay_pass}};
    report["schmidt_number_comparisons"] = comparisons;
    report["files"] = out.files;
    report["all_pass"] = out.all_pass;
    const std::string report_path = detail::join_path(dir, "report.json");
    detail::write_file(report_path, report.dump(2) + "\n");
    out.files.push_back(report_path);
    return out;
}

} // namespace ringsfwm
