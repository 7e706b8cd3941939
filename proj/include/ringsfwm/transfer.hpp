#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ringsfwm/core.hpp"
#include "ringsfwm/errors.hpp"

namespace ringsfwm {

enum class Channel { pump, idler, signal };

inline double optimal_coupling(double kappa) {
    if (!(kappa > 0.0))
        throw NonPositiveRate("kappa must be positive");
    return kappa / std::sqrt(12.0);
}

// Spectral transfer function of the coupled-ring pair, written in terms of
// the detuning Delta = omega0 - omega of the queried channel:
//
//   M(Delta) = 2 g sqrt(kappa) / (2 g^2 - 2 Delta^2 + i Delta kappa)
//
// The denominator cannot vanish for g > 0 (real and imaginary parts have no
// common zero), so no pole handling is needed.
inline std::complex<double> transfer_value(double delta, double kappa, double g) {
    return 2.0 * g * std::sqrt(kappa)
         / std::complex<double>(2.0 * g * g - 2.0 * delta * delta, delta * kappa);
}

inline std::complex<double> pump_transfer(const ResonatorParams& params, double omega) {
    return transfer_value(params.omega0_p - omega, params.kappa_p, params.g_p);
}

inline std::complex<double> mode_transfer(const ResonatorParams& params, double omega,
                                          Channel channel) {
    double omega0;
    switch (channel) {
    case Channel::idler:  omega0 = params.omega0_i; break;
    case Channel::signal: omega0 = params.omega0_s; break;
    default:
        throw Error("mode_transfer expects the idler or signal channel");
    }
    return transfer_value(omega0 - omega, params.kappa_is, params.g_is);
}

// Largest value of |M| over all detunings. Below kappa/sqrt(8) the coupling
// is weak enough that the on-resonance value sqrt(kappa)/g is the peak;
// above it the response splits and peaks at Delta^2 = g^2 - kappa^2/8.
inline double transfer_peak_magnitude(double kappa, double g) {
    if (g * g <= kappa * kappa / 8.0)
        return std::sqrt(kappa) / g;
    return (2.0 / std::sqrt(kappa)) / std::sqrt(1.0 - kappa * kappa / (16.0 * g * g));
}

struct TransferTrace {
    FrequencyGrid grid;
    std::vector<std::complex<double>> values;
    std::vector<double> phase; // unwrapped argument, zero at the center sample
    Channel channel = Channel::pump;
    double kappa = 0.0; // rates of the traced channel, kept for the delay limit
    double g = 0.0;
};

namespace detail {

inline std::complex<double> channel_value(const ResonatorParams& params, double omega,
                                          Channel channel) {
    return channel == Channel::pump ? pump_transfer(params, omega)
                                    : mode_transfer(params, omega, channel);
}

inline double wrap_to_pi(double x) {
    const double pi = 3.14159265358979323846;
    while (x > pi) x -= 2.0 * pi;
    while (x < -pi) x += 2.0 * pi;
    return x;
}

} // namespace detail

// Samples M over the grid and unwraps its argument outward from the center,
// so phase(center) = 0 and adjacent differences stay below pi.
inline TransferTrace trace(const ResonatorParams& params, const FrequencyGrid& grid,
                           Channel channel) {
    TransferTrace t;
    t.grid = grid;
    t.channel = channel;
    if (channel == Channel::pump) {
        t.kappa = params.kappa_p;
        t.g = params.g_p;
    } else {
        t.kappa = params.kappa_is;
        t.g = params.g_is;
    }

    const int n = grid.n_points;
    t.values.resize(n);
    for (int i = 0; i < n; ++i)
        t.values[i] = detail::channel_value(params, grid.points[i], channel);

    t.phase.assign(n, 0.0);
    std::vector<double> raw(n);
    for (int i = 0; i < n; ++i)
        raw[i] = std::arg(t.values[i]);

    const int mid = grid.center_index();
    t.phase[mid] = raw[mid];
    for (int i = mid + 1; i < n; ++i)
        t.phase[i] = t.phase[i - 1] + detail::wrap_to_pi(raw[i] - raw[i - 1]);
    for (int i = mid - 1; i >= 0; --i)
        t.phase[i] = t.phase[i + 1] + detail::wrap_to_pi(raw[i] - raw[i + 1]);
    return t;
}

// Delay T(omega) = phase(omega) / (omega - center). The center sample takes
// the removable-singularity limit kappa / (2 g^2) from the phase slope.
inline std::vector<double> delay_function(const TransferTrace& t) {
    const int n = t.grid.n_points;
    const int mid = t.grid.center_index();
    std::vector<double> delay(n);
    for (int i = 0; i < n; ++i) {
        if (i == mid)
            delay[i] = t.kappa / (2.0 * t.g * t.g);
        else
            delay[i] = t.phase[i] / (t.grid.points[i] - t.grid.center);
    }
    return delay;
}

namespace detail {

// Unwrapped argument of M at detuning d from the channel center, evaluated
// in extended precision. atan2 already gives the unwrapped value here: the
// real part of the denominator only turns negative once |d| > g, where the
// imaginary part keeps the result on the correct branch.
inline long double phase_at(long double d, long double kappa, long double g) {
    return atan2l(d * kappa, 2.0L * g * g - 2.0L * d * d);
}

inline long double stencil_d3(long double h, long double kappa, long double g) {
    const long double f1 = phase_at(h, kappa, g), f2 = phase_at(2.0L * h, kappa, g);
    const long double fm1 = phase_at(-h, kappa, g), fm2 = phase_at(-2.0L * h, kappa, g);
    return (f2 - 2.0L * f1 + 2.0L * fm1 - fm2) / (2.0L * h * h * h);
}

inline long double stencil_d5(long double h, long double kappa, long double g) {
    const long double f1 = phase_at(h, kappa, g), f2 = phase_at(2.0L * h, kappa, g),
                      f3 = phase_at(3.0L * h, kappa, g);
    const long double fm1 = phase_at(-h, kappa, g), fm2 = phase_at(-2.0L * h, kappa, g),
                      fm3 = phase_at(-3.0L * h, kappa, g);
    return (f3 - 4.0L * f2 + 5.0L * f1 - 5.0L * fm1 + 4.0L * fm2 - fm3)
         / (2.0L * h * h * h * h * h);
}

} // namespace detail

// l-th derivative of the transfer phase at resonance via central differences
// with step h = 1e-3 * kappa. Odd orders carry an O(h^2) truncation term, so
// one step-halving Richardson level removes it; even orders vanish by the
// oddness of the phase and the plain stencil already returns an exact zero.
inline double phase_derivative_at_center(const ResonatorParams& params, Channel channel,
                                         int order) {
    const double kappa = channel == Channel::pump ? params.kappa_p : params.kappa_is;
    const double g = channel == Channel::pump ? params.g_p : params.g_is;
    const long double h = 1e-3L * static_cast<long double>(kappa);
    const long double k = kappa, gg = g;

    switch (order) {
    case 2: {
        const long double f1 = detail::phase_at(h, k, gg);
        const long double fm1 = detail::phase_at(-h, k, gg);
        return static_cast<double>((f1 - 2.0L * detail::phase_at(0.0L, k, gg) + fm1)
                                   / (h * h));
    }
    case 3: {
        const long double d_h = detail::stencil_d3(h, k, gg);
        const long double d_h2 = detail::stencil_d3(h / 2.0L, k, gg);
        return static_cast<double>((4.0L * d_h2 - d_h) / 3.0L);
    }
    case 4: {
        const long double f1 = detail::phase_at(h, k, gg), f2 = detail::phase_at(2.0L * h, k, gg);
        const long double fm1 = detail::phase_at(-h, k, gg),
                          fm2 = detail::phase_at(-2.0L * h, k, gg);
        return static_cast<double>((f2 - 4.0L * f1 + 6.0L * detail::phase_at(0.0L, k, gg)
                                    - 4.0L * fm1 + fm2) / (h * h * h * h));
    }
    case 5: {
        const long double d_h = detail::stencil_d5(h, k, gg);
        const long double d_h2 = detail::stencil_d5(h / 2.0L, k, gg);
        return static_cast<double>((4.0L * d_h2 - d_h) / 3.0L);
    }
    default:
        throw UnsupportedOrder("phase derivative order must be 2, 3, 4 or 5");
    }
}

} // namespace ringsfwm
