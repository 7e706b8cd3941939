#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ringsfwm/core.hpp"
#include "ringsfwm/errors.hpp"
#include "ringsfwm/transfer.hpp"

namespace ringsfwm {

inline std::complex<double> pump_amplitude(const PumpSpec& pump, double omega) {
    const double d = omega - pump.omega0;
    const double pi = 3.14159265358979323846;
    return std::pow(2.0 * pi * pump.sigma, -0.25) * std::exp(-d * d / (4.0 * pump.sigma));
}

// Test hook: `unit` replaces the cavity response by 1 so the convolution can
// be checked against the closed-form Gaussian result.
enum class PumpFilter { coupled, unit };

// Pointwise product M_p(omega) * alpha(omega) sampled on the given grid.
inline std::vector<std::complex<double>>
in_cavity_pump(const ResonatorParams& params, const PumpSpec& pump,
               const FrequencyGrid& grid, PumpFilter filter = PumpFilter::coupled) {
    std::vector<std::complex<double>> f(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) {
        const std::complex<double> a = pump_amplitude(pump, grid.points[i]);
        f[i] = filter == PumpFilter::coupled ? pump_transfer(params, grid.points[i]) * a : a;
    }
    return f;
}

// Self-convolution h(W) = integral f(W - w) f(w) dw of the in-cavity pump,
// which depends on idler and signal frequencies only through their sum W.
struct PumpConvolution {
    FrequencyGrid sum_grid;
    std::vector<std::complex<double>> values;

    // Linear interpolation between samples; zero outside the stored range.
    std::complex<double> value_at(double omega_sum) const {
        const double t = (omega_sum - sum_grid.center) / sum_grid.spacing()
                       + sum_grid.center_index();
        if (t < 0.0 || t > sum_grid.n_points - 1)
            return {0.0, 0.0};
        const int i = std::min(static_cast<int>(t), sum_grid.n_points - 2);
        const double frac = t - i;
        return values[i] * (1.0 - frac) + values[i + 1] * frac;
    }
};

// Trapezoidal quadrature of the self-convolution on the grid's own spacing.
// By default the output covers the full doubled extent of the input grid;
// out_half_points restricts it to that many steps either side of 2*center
// (each retained sample is still the complete quadrature sum, so restricting
// the range changes no values, only how many are kept).
inline PumpConvolution pump_convolution(const FrequencyGrid& pump_grid,
                                        const std::vector<std::complex<double>>& in_cavity,
                                        int out_half_points = -1) {
    const int np = pump_grid.n_points;
    if (static_cast<int>(in_cavity.size()) != np)
        throw BadGridSpec("in-cavity sample count does not match the pump grid");
    const int full_half = np - 1;
    const int half = out_half_points < 0 ? full_half : out_half_points;
    if (half < 1 || half > full_half)
        throw BadGridSpec("convolution output range exceeds the doubled extent");

    PumpConvolution conv;
    conv.sum_grid = make_grid(2.0 * pump_grid.center, half * pump_grid.spacing(),
                              2 * half + 1);
    conv.values.assign(2 * half + 1, {0.0, 0.0});
    for (int out = 0; out < 2 * half + 1; ++out) {
        const int m = out - half + full_half; // index into the full convolution
        const int k_lo = std::max(0, m - (np - 1));
        const int k_hi = std::min(np - 1, m);
        std::complex<double> acc{0.0, 0.0};
        for (int k = k_lo; k <= k_hi; ++k)
            acc += pump_grid.weights[k] * in_cavity[k] * in_cavity[m - k];
        conv.values[out] = acc;
    }
    return conv;
}

struct JsaGrid {
    FrequencyGrid grid_i;
    FrequencyGrid grid_s;
    Eigen::MatrixXcd values; // rows: idler samples, cols: signal samples
};

// Test hook: `unit_envelope` replaces h by 1, making the JSA an exact outer
// product of the two mode transfer functions.
enum class JsaHook { standard, unit_envelope };

namespace detail {

// Pump grid matched to the mode grids: its spacing divides the mode spacing
// by an integer factor so every idler+signal sum lands exactly on a sample,
// and the factor grows when the pump is too narrow for the mode spacing to
// resolve it (at least 8 samples per FWHM).
struct AlignedPumpGrid {
    FrequencyGrid grid;
    int stride = 1;      // mode spacing / pump spacing
    int sum_half = 0;    // half extent of the restricted convolution output
};

inline AlignedPumpGrid aligned_pump_grid(const ResonatorParams& params, const PumpSpec& pump,
                                         double mode_spacing, int mid_i, int mid_s,
                                         double halfwidth_factor) {
    const double fwhm = pump_fwhm_from_sigma(pump.sigma);
    const int stride = std::max(1, static_cast<int>(std::ceil(8.0 * mode_spacing / fwhm)));
    const double hp = mode_spacing / stride;
    const int sum_half = stride * (mid_i + mid_s + 2);
    int half_points = static_cast<int>(
        std::ceil(halfwidth_factor * std::max(params.kappa_p, fwhm) / hp));
    half_points = std::max(half_points, sum_half / 2 + 2);
    AlignedPumpGrid out;
    out.grid = make_grid(pump.omega0, half_points * hp, 2 * half_points + 1);
    out.stride = stride;
    out.sum_half = sum_half;
    return out;
}

} // namespace detail

// F(w_i, w_s) = h(w_i + w_s) * M_i(w_i) * M_s(w_s), with h the pump
// self-convolution. An overall constant prefactor is dropped throughout; the
// Schmidt normalization later removes it anyway.
inline JsaGrid jsa(const ResonatorParams& params, const PumpSpec& pump,
                   const FrequencyGrid& grid_i, const FrequencyGrid& grid_s,
                   double pump_halfwidth_factor = 8.0, JsaHook hook = JsaHook::standard) {
    const double carrier_gap =
        std::abs(2.0 * params.omega0_p - (params.omega0_i + params.omega0_s));
    if (carrier_gap > 1e-9 * params.kappa_is)
        throw CarrierMismatch("pump carrier is not centered between idler and signal");
    if (std::abs(grid_i.center - params.omega0_i) > 1e-9 * params.kappa_is ||
        std::abs(grid_s.center - params.omega0_s) > 1e-9 * params.kappa_is)
        throw BadGridSpec("mode grids must be centered on their channel frequencies");

    const int ni = grid_i.n_points, ns = grid_s.n_points;
    const int mid_i = grid_i.center_index(), mid_s = grid_s.center_index();

    std::vector<std::complex<double>> mi(ni), ms(ns);
    for (int j = 0; j < ni; ++j)
        mi[j] = mode_transfer(params, grid_i.points[j], Channel::idler);
    for (int k = 0; k < ns; ++k)
        ms[k] = mode_transfer(params, grid_s.points[k], Channel::signal);

    JsaGrid out;
    out.grid_i = grid_i;
    out.grid_s = grid_s;
    out.values.resize(ni, ns);

    if (hook == JsaHook::unit_envelope) {
        for (int j = 0; j < ni; ++j)
            for (int k = 0; k < ns; ++k)
                out.values(j, k) = mi[j] * ms[k];
        return out;
    }

    const double hi = grid_i.spacing(), hs = grid_s.spacing();
    const bool aligned = std::abs(hi - hs) <= 1e-12 * hi;

    if (aligned) {
        const auto apg = detail::aligned_pump_grid(params, pump, hi, mid_i, mid_s,
                                                   pump_halfwidth_factor);
        const auto f = in_cavity_pump(params, pump, apg.grid);
        const auto conv = pump_convolution(apg.grid, f, apg.sum_half);
        for (int j = 0; j < ni; ++j) {
            const int base = (j - mid_i) * apg.stride + apg.sum_half;
            for (int k = 0; k < ns; ++k)
                out.values(j, k) = conv.values[base + (k - mid_s) * apg.stride] * mi[j] * ms[k];
        }
        return out;
    }

    // Incommensurate grids: fall back to interpolating the convolution.
    const double fwhm = pump_fwhm_from_sigma(pump.sigma);
    const double hp = std::min({hi, hs, fwhm / 8.0});
    const int half_points = static_cast<int>(
        std::ceil((pump_halfwidth_factor * std::max(params.kappa_p, fwhm)
                   + grid_i.half_width + grid_s.half_width) / hp));
    const auto pg = make_grid(pump.omega0, half_points * hp, 2 * half_points + 1);
    const auto conv = pump_convolution(pg, in_cavity_pump(params, pump, pg));
    for (int j = 0; j < ni; ++j) {
        const double di = (j - mid_i) * hi;
        for (int k = 0; k < ns; ++k) {
            const double sum = 2.0 * pump.omega0 + di + (k - mid_s) * hs;
            out.values(j, k) = conv.value_at(sum) * mi[j] * ms[k];
        }
    }
    return out;
}

inline Eigen::MatrixXd jsi(const JsaGrid& amp) {
    return amp.values.cwiseAbs2();
}

// Pearson correlation of the JSI treated as a 2-D probability distribution
// over (idler, signal) detunings. Near zero means no spectral correlation.
inline double jsi_correlation(const JsaGrid& amp) {
    const Eigen::MatrixXd p = jsi(amp);
    const int ni = amp.grid_i.n_points, ns = amp.grid_s.n_points;
    double norm = 0.0, ei = 0.0, es = 0.0;
    for (int j = 0; j < ni; ++j)
        for (int k = 0; k < ns; ++k) {
            const double w = amp.grid_i.weights[j] * amp.grid_s.weights[k] * p(j, k);
            norm += w;
            ei += w * amp.grid_i.points[j];
            es += w * amp.grid_s.points[k];
        }
    if (norm <= 0.0)
        throw DegenerateKernel("joint spectral intensity is identically zero");
    ei /= norm;
    es /= norm;
    double vii = 0.0, vss = 0.0, vis = 0.0;
    for (int j = 0; j < ni; ++j)
        for (int k = 0; k < ns; ++k) {
            const double w = amp.grid_i.weights[j] * amp.grid_s.weights[k] * p(j, k);
            const double di = amp.grid_i.points[j] - ei;
            const double ds = amp.grid_s.points[k] - es;
            vii += w * di * di;
            vss += w * ds * ds;
            vis += w * di * ds;
        }
    return vis / std::sqrt(vii * vss);
}

} // namespace ringsfwm
