#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ringsfwm/biphoton.hpp"
#include "ringsfwm/core.hpp"
#include "ringsfwm/errors.hpp"

namespace ringsfwm {

struct SchmidtResult {
    std::vector<double> coefficients; // descending, normalized to unit sum
    double schmidt_number = 0.0;
    double purity = 0.0;
    int n_retained = 0;
    // Mode functions, filled on request: column n of each matrix holds the
    // idler / signal profile of Schmidt mode n on the respective grid.
    std::optional<Eigen::MatrixXcd> idler_modes;
    std::optional<Eigen::MatrixXcd> signal_modes;
};

inline double schmidt_number(const std::vector<double>& coefficients) {
    double sum = 0.0, sum2 = 0.0;
    for (double l : coefficients) {
        sum += l;
        sum2 += l * l;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw NotNormalized("Schmidt coefficients do not sum to one");
    return 1.0 / sum2;
}

namespace detail {

inline Eigen::MatrixXcd weighted_kernel(const JsaGrid& amp) {
    const int ni = amp.grid_i.n_points, ns = amp.grid_s.n_points;
    Eigen::MatrixXcd a(ni, ns);
    for (int j = 0; j < ni; ++j) {
        const double sw = std::sqrt(amp.grid_i.weights[j]);
        for (int k = 0; k < ns; ++k)
            a(j, k) = sw * amp.values(j, k) * std::sqrt(amp.grid_s.weights[k]);
    }
    return a;
}

// Schmidt number straight from the Gram matrix:
//   K = (tr G)^2 / ||G||_F^2  with  G = A^dagger A,
// algebraically identical to 1/sum(lambda^2) but needing no eigensolve.
inline double kernel_schmidt_number(const Eigen::MatrixXcd& a) {
    const Eigen::MatrixXcd gram = a.adjoint() * a;
    const double tr = gram.trace().real();
    const double fro2 = gram.squaredNorm();
    if (!(fro2 > 0.0))
        throw DegenerateKernel("joint spectral amplitude is identically zero");
    return tr * tr / fro2;
}

} // namespace detail

// Weighted singular-value decomposition of the JSA. The quadrature weights
// enter as diag(sqrt(w_i)) F diag(sqrt(w_s)) so the singular values
// approximate the continuous-kernel Schmidt coefficients.
inline SchmidtResult schmidt_decompose(const JsaGrid& amp, bool with_modes = false) {
    const Eigen::MatrixXcd a = detail::weighted_kernel(amp);
    if (!(a.squaredNorm() > 0.0))
        throw DegenerateKernel("joint spectral amplitude is identically zero");

    const Eigen::MatrixXcd gram = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        gram, with_modes ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = solver.eigenvalues(); // ascending

    const int n = static_cast<int>(ev.size());
    const double ev_max = ev(n - 1);
    // Eigenvalues of the Gram matrix are squared singular values; clip the
    // negative rounding noise and drop everything below (1e-14 * s_max)^2.
    const double cutoff = 1e-28 * ev_max;

    SchmidtResult out;
    double sum = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        const double v = std::max(ev(i), 0.0);
        if (v < cutoff)
            break;
        out.coefficients.push_back(v);
        sum += v;
    }
    out.n_retained = static_cast<int>(out.coefficients.size());
    double sum2 = 0.0;
    for (double& l : out.coefficients) {
        l /= sum;
        sum2 += l * l;
    }
    out.schmidt_number = 1.0 / sum2;
    out.purity = sum2;

    if (with_modes) {
        const int kept = out.n_retained;
        Eigen::MatrixXcd vs(a.cols(), kept), ui(a.rows(), kept);
        for (int m = 0; m < kept; ++m) {
            const Eigen::VectorXcd v = solver.eigenvectors().col(n - 1 - m);
            vs.col(m) = v;
            ui.col(m) = a * v / std::sqrt(std::max(ev(n - 1 - m), cutoff));
        }
        out.signal_modes = std::move(vs);
        out.idler_modes = std::move(ui);
    }
    return out;
}

struct LadderOptions {
    double halfwidth_factor = 8.0; // mode grid half width in units of kappa_is
    int max_n = 8193;              // refinement cap
    JsaHook hook = JsaHook::standard;
};

namespace detail {

inline Eigen::MatrixXcd kernel_at(const ResonatorParams& params, const PumpSpec& pump,
                                  int n, const LadderOptions& opts) {
    const auto gi = make_grid(params.omega0_i, opts.halfwidth_factor * params.kappa_is, n);
    const auto gs = make_grid(params.omega0_s, opts.halfwidth_factor * params.kappa_is, n);
    return weighted_kernel(jsa(params, pump, gi, gs, opts.halfwidth_factor, opts.hook));
}

} // namespace detail

struct ConvergedNumber {
    double k = 0.0;
    double achieved_error = 0.0;
    int n_final = 0;
};

// Refines the mode grids n -> 2n-1 (same extent, nested samples) until two
// successive Schmidt numbers agree within tol. Uses the trace formula only,
// so it is safe on hot paths.
inline ConvergedNumber converged_schmidt_number(const ResonatorParams& params,
                                                const PumpSpec& pump, int base_n, double tol,
                                                const LadderOptions& opts = {}) {
    if (base_n < 3 || base_n % 2 == 0)
        throw BadGridSpec("base_n must be odd and at least 3");
    if (!(tol > 0.0))
        throw Error("tolerance must be positive");

    int n = base_n;
    double k_prev = detail::kernel_schmidt_number(detail::kernel_at(params, pump, n, opts));
    for (;;) {
        const int n2 = 2 * n - 1;
        if (n2 > opts.max_n)
            throw NoConvergence("resolution cap reached before the tolerance", k_prev,
                                std::numeric_limits<double>::quiet_NaN(), n);
        const double k_next =
            detail::kernel_schmidt_number(detail::kernel_at(params, pump, n2, opts));
        const double est = std::abs(k_next - k_prev);
        if (est < tol)
            return ConvergedNumber{k_next, est, n2};
        if (2 * n2 - 1 > opts.max_n)
            throw NoConvergence("resolution cap reached before the tolerance", k_next, est, n2);
        n = n2;
        k_prev = k_next;
    }
}

struct ConvergedSchmidt {
    SchmidtResult result;
    double achieved_error = 0.0;
    int n_final = 0;
};

// Same ladder, but finishes with a full decomposition at the accepted
// resolution so the caller gets coefficients, not just K.
inline ConvergedSchmidt converged_schmidt(const ResonatorParams& params, const PumpSpec& pump,
                                          int base_n, double tol,
                                          const LadderOptions& opts = {},
                                          bool with_modes = false) {
    const ConvergedNumber cn = converged_schmidt_number(params, pump, base_n, tol, opts);
    const auto gi =
        make_grid(params.omega0_i, opts.halfwidth_factor * params.kappa_is, cn.n_final);
    const auto gs =
        make_grid(params.omega0_s, opts.halfwidth_factor * params.kappa_is, cn.n_final);
    ConvergedSchmidt out;
    out.result = schmidt_decompose(
        jsa(params, pump, gi, gs, opts.halfwidth_factor, opts.hook), with_modes);
    out.achieved_error = cn.achieved_error;
    out.n_final = cn.n_final;
    return out;
}

} // namespace ringsfwm
