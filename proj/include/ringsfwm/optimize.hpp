#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "ringsfwm/core.hpp"
#include "ringsfwm/errors.hpp"
#include "ringsfwm/schmidt.hpp"
#include "ringsfwm/transfer.hpp"

namespace ringsfwm {

struct OptimizationRecord {
    double ratio = 0.0;              // kappa_p / kappa_is
    double sigma_opt = 0.0;
    double fwhm_over_kappa_p = 0.0;
    double k_min = 0.0;
    double purity = 0.0;
    int n_evals = 0;
    bool converged = false;
};

namespace detail {

struct GoldenResult {
    double x = 0.0;
    double fx = 0.0;
};

// Golden-section minimizer with an entry bracket check: if an endpoint value
// undercuts both interior probes by more than eps, the minimum is not inside
// and BadBracket reports which side to widen.
template <class F>
GoldenResult golden_bracketed(F&& f, double a, double b, double tol, double eps) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    const double fa = f(a), fb = f(b);
    double f1 = f(x1), f2 = f(x2);

    const double inner = std::min(f1, f2);
    if (std::min(fa, fb) < inner - eps) {
        const int side = fa < fb ? -1 : 1;
        throw BadBracket("endpoint value is below both interior probes", fa, fb, inner, side);
    }

    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? GoldenResult{x1, f1} : GoldenResult{x2, f2};
}

// K(sigma) objective with a cache keyed on log sigma, so repeated probes of
// the same width (endpoints carried across widening rounds) cost nothing.
struct SchmidtObjective {
    ResonatorParams params;
    double inner_tol;
    int base_n = 129;
    LadderOptions ladder{};
    std::map<double, double> cache;
    int evals = 0;

    double operator()(double log_sigma) {
        const auto it = cache.find(log_sigma);
        if (it != cache.end())
            return it->second;
        const PumpSpec pump{std::exp(log_sigma), params.omega0_p};
        const double k =
            converged_schmidt_number(params, pump, base_n, inner_tol, ladder).k;
        ++evals;
        cache.emplace(log_sigma, k);
        return k;
    }
};

inline OptimizationRecord record_from(const ResonatorParams& params, double sigma, double k,
                                      int evals, bool converged) {
    OptimizationRecord r;
    r.ratio = params.kappa_p / params.kappa_is;
    r.sigma_opt = sigma;
    r.fwhm_over_kappa_p = pump_fwhm_from_sigma(sigma) / params.kappa_p;
    r.k_min = k;
    r.purity = 1.0 / k;
    r.n_evals = evals;
    r.converged = converged;
    return r;
}

} // namespace detail

// Minimizes K over the pump width by golden-section search on log sigma,
// stopping once the bracket width (in log sigma) falls below tol. Inner K
// evaluations run the resolution ladder at tol/10. Throws BadBracket when
// the minimum is not inside [sigma_lo, sigma_hi].
inline OptimizationRecord optimize_pump_width(const ResonatorParams& params, double sigma_lo,
                                              double sigma_hi, double tol) {
    if (!(sigma_lo > 0.0) || !(sigma_hi > sigma_lo))
        throw Error("need 0 < sigma_lo < sigma_hi");
    if (!(tol > 0.0))
        throw Error("tolerance must be positive");
    detail::SchmidtObjective obj{validate_params(params), tol / 10.0};
    const auto best = detail::golden_bracketed(obj, std::log(sigma_lo), std::log(sigma_hi),
                                               tol, tol / 10.0);
    return detail::record_from(params, std::exp(best.x), best.fx, obj.evals, true);
}

struct AutoOptimization {
    OptimizationRecord record;
    bool plateau_edge = false; // minimum accepted at a bracket edge after a flatness probe
    int widen_rounds = 0;
};

// Widening wrapper around optimize_pump_width. When the landscape slides
// downhill through an endpoint, K is probed one bracket-width factor further
// out (FWHM x4, i.e. sigma x16); if the drop is below tol the curve has
// flattened and the endpoint is accepted as the optimum, otherwise the
// bracket is widened on that side and the search repeats. All evaluations
// share one cache, so n_evals counts distinct pump widths.
inline AutoOptimization optimize_pump_width_auto(const ResonatorParams& params, double tol,
                                                 double fwhm_lo_over_kp = 0.05,
                                                 double fwhm_hi_over_kp = 5.0,
                                                 int max_rounds = 6) {
    if (!(tol > 0.0))
        throw Error("tolerance must be positive");
    detail::SchmidtObjective obj{validate_params(params), tol / 10.0};
    double sigma_lo = pump_sigma_from_fwhm(fwhm_lo_over_kp * params.kappa_p);
    double sigma_hi = pump_sigma_from_fwhm(fwhm_hi_over_kp * params.kappa_p);

    for (int round = 0;; ++round) {
        try {
            const auto best = detail::golden_bracketed(obj, std::log(sigma_lo),
                                                       std::log(sigma_hi), tol, tol / 10.0);
            AutoOptimization out;
            out.record = detail::record_from(params, std::exp(best.x), best.fx, obj.evals, true);
            out.widen_rounds = round;
            return out;
        } catch (const BadBracket&) {
            if (round >= max_rounds)
                throw;
            if (obj(std::log(sigma_hi)) <= obj(std::log(sigma_lo))) {
                const double k_edge = obj(std::log(sigma_hi));
                const double k_probe = obj(std::log(16.0 * sigma_hi));
                if (k_edge - k_probe < tol) {
                    AutoOptimization out;
                    out.record =
                        detail::record_from(params, sigma_hi, k_edge, obj.evals, true);
                    out.plateau_edge = true;
                    out.widen_rounds = round;
                    return out;
                }
                sigma_hi *= 16.0;
            } else {
                const double k_edge = obj(std::log(sigma_lo));
                const double k_probe = obj(std::log(sigma_lo / 16.0));
                if (k_edge - k_probe < tol) {
                    AutoOptimization out;
                    out.record =
                        detail::record_from(params, sigma_lo, k_edge, obj.evals, true);
                    out.plateau_edge = true;
                    out.widen_rounds = round;
                    return out;
                }
                sigma_lo /= 16.0;
            }
        }
    }
}

inline ResonatorParams params_for_ratio(double ratio, double g_p_over_opt = 1.0,
                                        double g_is_over_opt = 1.0) {
    if (!(ratio > 0.0))
        throw NonPositiveRate("kappa_p / kappa_is must be positive");
    ResonatorParams p;
    p.kappa_p = ratio;
    p.kappa_is = 1.0;
    p.g_p = g_p_over_opt * optimal_coupling(p.kappa_p);
    p.g_is = g_is_over_opt * optimal_coupling(p.kappa_is);
    p.omega0_p = 0.0;
    p.omega0_i = 0.0;
    p.omega0_s = 0.0;
    return validate_params(p);
}

// One optimization per ratio with the default auto bracket
// (FWHM in [0.05, 5] kappa_p, widened on demand). A failed entry is returned
// with converged = false instead of aborting the sweep.
inline std::vector<OptimizationRecord> sweep_ratio(const std::vector<double>& ratios,
                                                   double tol) {
    std::vector<OptimizationRecord> out;
    out.reserve(ratios.size());
    for (double ratio : ratios) {
        try {
            out.push_back(optimize_pump_width_auto(params_for_ratio(ratio), tol).record);
        } catch (const Error&) {
            OptimizationRecord r;
            r.ratio = ratio;
            r.k_min = std::numeric_limits<double>::quiet_NaN();
            r.purity = std::numeric_limits<double>::quiet_NaN();
            r.converged = false;
            out.push_back(r);
        }
    }
    return out;
}

} // namespace ringsfwm
