#pragma once

#include <cmath>
#include <vector>

#include "ringsfwm/errors.hpp"

namespace ringsfwm {

// All rates are angular frequencies in units of kappa_is unless stated
// otherwise. Mode centers are kept explicit so the energy bookkeeping
// 2*omega0_p = omega0_i + omega0_s can be checked where it matters.
struct ResonatorParams {
    double kappa_p = 0.0;
    double kappa_is = 0.0;
    double g_p = 0.0;
    double g_is = 0.0;
    double omega0_p = 0.0;
    double omega0_i = 0.0;
    double omega0_s = 0.0;
};

inline ResonatorParams validate_params(const ResonatorParams& raw) {
    if (!(raw.kappa_p > 0.0))
        throw NonPositiveRate("kappa_p must be positive");
    if (!(raw.kappa_is > 0.0))
        throw NonPositiveRate("kappa_is must be positive");
    if (!(raw.g_p > 0.0))
        throw NonPositiveRate("g_p must be positive");
    if (!(raw.g_is > 0.0))
        throw NonPositiveRate("g_is must be positive");
    return raw;
}

// Uniform sampling of [center - half_width, center + half_width] with
// trapezoid weights. n_points is odd so the center is always a sample.
struct FrequencyGrid {
    double center = 0.0;
    double half_width = 0.0;
    int n_points = 0;
    std::vector<double> points;
    std::vector<double> weights;

    double spacing() const { return 2.0 * half_width / (n_points - 1); }
    int center_index() const { return n_points / 2; }
};

inline FrequencyGrid make_grid(double center, double half_width, int n_points) {
    if (!(half_width > 0.0))
        throw BadGridSpec("half_width must be positive");
    if (n_points < 3 || n_points % 2 == 0)
        throw BadGridSpec("n_points must be odd and at least 3");

    FrequencyGrid g;
    g.center = center;
    g.half_width = half_width;
    g.n_points = n_points;
    g.points.resize(n_points);
    g.weights.assign(n_points, 0.0);

    const double h = g.spacing();
    const int mid = n_points / 2;
    // center + (i - mid)*h keeps the grid exactly symmetric and puts the
    // center sample at `center` with no rounding.
    for (int i = 0; i < n_points; ++i)
        g.points[i] = center + (i - mid) * h;
    for (int i = 0; i < n_points; ++i)
        g.weights[i] = h;
    g.weights.front() = 0.5 * h;
    g.weights.back() = 0.5 * h;
    return g;
}

// Gaussian pump envelope alpha(w) = (2 pi sigma)^(-1/4) exp(-(w-omega0)^2/(4 sigma)).
// sigma is the variance-like width parameter of the amplitude.
struct PumpSpec {
    double sigma = 0.0;
    double omega0 = 0.0;
};

inline PumpSpec make_pump(double sigma, double omega0) {
    if (!(sigma > 0.0))
        throw NonPositiveRate("pump sigma must be positive");
    return PumpSpec{sigma, omega0};
}

// FWHM here is the full width at half maximum of |alpha|^2.
inline double pump_sigma_from_fwhm(double fwhm) {
    return fwhm * fwhm / (8.0 * std::log(2.0));
}

inline double pump_fwhm_from_sigma(double sigma) {
    return std::sqrt(8.0 * sigma * std::log(2.0));
}

} // namespace ringsfwm
