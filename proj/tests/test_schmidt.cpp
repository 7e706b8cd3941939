#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "ringsfwm/biphoton.hpp"
#include "ringsfwm/core.hpp"
#include "ringsfwm/optimize.hpp"
#include "ringsfwm/schmidt.hpp"

using namespace ringsfwm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Gaussian kernel with a known continuous Schmidt number of exactly 5/4.
JsaGrid gaussian_pair_kernel(int n) {
    JsaGrid amp;
    amp.grid_i = make_grid(0.0, 6.0, n);
    amp.grid_s = make_grid(0.0, 6.0, n);
    amp.values.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const double x = amp.grid_i.points[j], y = amp.grid_s.points[k];
            amp.values(j, k) = std::exp(-x * x - y * y - 1.2 * x * y);
        }
    return amp;
}

JsaGrid default_amplitude(double ratio, double fwhm_over_kp, int n) {
    const auto params = params_for_ratio(ratio);
    const PumpSpec pump{pump_sigma_from_fwhm(fwhm_over_kp * params.kappa_p), 0.0};
    const auto gi = make_grid(0.0, 8.0 * params.kappa_is, n);
    return jsa(params, pump, gi, gi);
}

} // namespace

TEST_CASE("Gaussian test kernel reproduces its exact Schmidt number", "[schmidt]") {
    const auto res = schmidt_decompose(gaussian_pair_kernel(257));
    REQUIRE_THAT(res.schmidt_number, WithinAbs(1.25, 1e-10));
    REQUIRE_THAT(res.purity, WithinRel(1.0 / res.schmidt_number, 1e-14));

    // coefficients are a normalized, descending, nonnegative sequence
    double sum = 0.0;
    for (std::size_t i = 0; i < res.coefficients.size(); ++i) {
        REQUIRE(res.coefficients[i] >= 0.0);
        if (i > 0)
            REQUIRE(res.coefficients[i] <= res.coefficients[i - 1]);
        sum += res.coefficients[i];
    }
    REQUIRE_THAT(sum, WithinAbs(1.0, 1e-12));

    // geometric spectrum with ratio 1/9: largest coefficient is 8/9
    REQUIRE_THAT(res.coefficients[0], WithinAbs(8.0 / 9.0, 1e-10));
    REQUIRE_THAT(res.coefficients[1] / res.coefficients[0], WithinAbs(1.0 / 9.0, 1e-8));

    // doubling the resolution does not move the answer
    const double k2 = detail::kernel_schmidt_number(
        detail::weighted_kernel(gaussian_pair_kernel(513)));
    REQUIRE_THAT(k2, WithinAbs(res.schmidt_number, 1e-6));

    REQUIRE_THAT(schmidt_number(res.coefficients),
                 WithinRel(res.schmidt_number, 1e-12));
}

TEST_CASE("an equal two-mode superposition splits fifty-fifty", "[schmidt]") {
    const int n = 129;
    const auto g = make_grid(0.0, 7.0, n);
    std::vector<double> u1(n), u2(n);
    double l1 = 0.0, l2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.points[i];
        u1[i] = std::exp(-x * x / 2.0);
        u2[i] = x * std::exp(-x * x / 2.0); // quadrature-orthogonal to u1 by symmetry
        l1 += g.weights[i] * u1[i] * u1[i];
        l2 += g.weights[i] * u2[i] * u2[i];
    }
    l1 = std::sqrt(l1);
    l2 = std::sqrt(l2);

    JsaGrid amp;
    amp.grid_i = g;
    amp.grid_s = g;
    amp.values.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            amp.values(j, k) = (u1[j] / l1) * (u1[k] / l1) + (u2[j] / l2) * (u2[k] / l2);

    const auto res = schmidt_decompose(amp);
    REQUIRE_THAT(res.schmidt_number, WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(res.coefficients[0], WithinAbs(0.5, 1e-12));
    REQUIRE_THAT(res.coefficients[1], WithinAbs(0.5, 1e-12));
    if (res.n_retained > 2)
        REQUIRE(res.coefficients[2] < 1e-12);
}

TEST_CASE("a factorable amplitude has Schmidt number one", "[schmidt]") {
    const auto params = params_for_ratio(2.0);
    const PumpSpec pump{0.5, 0.0};
    const auto g = make_grid(0.0, 8.0, 65);
    const auto amp = jsa(params, pump, g, g, 8.0, JsaHook::unit_envelope);
    const auto res = schmidt_decompose(amp);
    REQUIRE_THAT(res.schmidt_number, WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(res.coefficients[0], WithinAbs(1.0, 1e-12));

    LadderOptions opts;
    opts.hook = JsaHook::unit_envelope;
    const auto cn = converged_schmidt_number(params, pump, 65, 1e-9, opts);
    REQUIRE_THAT(cn.k, WithinAbs(1.0, 1e-12));
    REQUIRE(cn.achieved_error < 1e-12);
}

TEST_CASE("Schmidt spectrum is invariant under conjugation, transpose and weight scale",
          "[schmidt]") {
    const auto amp = default_amplitude(6.6, 0.45, 65);
    const auto base = schmidt_decompose(amp);

    JsaGrid conj{amp.grid_i, amp.grid_s, amp.values.conjugate()};
    JsaGrid trans{amp.grid_s, amp.grid_i, amp.values.transpose()};
    JsaGrid scaled = amp;
    for (double& w : scaled.grid_i.weights)
        w *= 3.0;

    for (const auto* variant : {&conj, &trans, &scaled}) {
        const auto res = schmidt_decompose(*variant);
        REQUIRE_THAT(res.schmidt_number, WithinRel(base.schmidt_number, 1e-12));
        for (int i = 0; i < 5; ++i)
            REQUIRE_THAT(res.coefficients[i], WithinAbs(base.coefficients[i], 1e-12));
    }
}

TEST_CASE("schmidt_number validates its input", "[schmidt]") {
    REQUIRE(schmidt_number({0.5, 0.5}) == 2.0);
    REQUIRE_THROWS_AS(schmidt_number({0.6, 0.3}), NotNormalized);
    REQUIRE_THROWS_AS(schmidt_number({}), NotNormalized);
}

TEST_CASE("an identically zero amplitude is rejected", "[schmidt]") {
    JsaGrid amp;
    amp.grid_i = make_grid(0.0, 1.0, 5);
    amp.grid_s = make_grid(0.0, 1.0, 5);
    amp.values = Eigen::MatrixXcd::Zero(5, 5);
    REQUIRE_THROWS_AS(schmidt_decompose(amp), DegenerateKernel);
    REQUIRE_THROWS_AS(detail::kernel_schmidt_number(amp.values), DegenerateKernel);
}

TEST_CASE("trace formula agrees with the eigensolve", "[schmidt]") {
    const auto amp = default_amplitude(6.6, 0.45, 129);
    const double k_trace = detail::kernel_schmidt_number(detail::weighted_kernel(amp));
    const double k_eigen = schmidt_decompose(amp).schmidt_number;
    REQUIRE_THAT(k_trace, WithinRel(k_eigen, 1e-12));
}

TEST_CASE("coupled-ring spectra at reference configurations", "[schmidt]") {
    struct Case {
        double ratio, fwhm_over_kp, k513;
    };
    const Case cases[] = {
        {1.0, 20.0, 1.07899475019235},
        {6.6, 0.45, 1.00075620395840},
        {6.6, 5.0, 1.00023314784477},
        {10.0, 5.0, 1.00005093795191},
    };
    for (const auto& c : cases) {
        const auto amp = default_amplitude(c.ratio, c.fwhm_over_kp, 513);
        const double k = detail::kernel_schmidt_number(detail::weighted_kernel(amp));
        REQUIRE_THAT(k, WithinRel(c.k513, 1e-9));
        REQUIRE(k >= 1.0);
    }

    // dominant coefficient of the most entangled reference case
    const auto res = schmidt_decompose(default_amplitude(1.0, 20.0, 513));
    REQUIRE_THAT(res.coefficients[0], WithinAbs(0.9620466510, 1e-8));
    REQUIRE_THAT(res.purity, WithinRel(1.0 / 1.07899475019235, 1e-9));
}

TEST_CASE("resolution ladder refines until two levels agree", "[schmidt]") {
    const auto params = params_for_ratio(6.6);
    const PumpSpec pump{pump_sigma_from_fwhm(0.45 * params.kappa_p), 0.0};
    const auto cn = converged_schmidt_number(params, pump, 129, 1e-5);
    REQUIRE(cn.n_final == 257);
    REQUIRE(cn.achieved_error < 1e-6);
    REQUIRE_THAT(cn.k, WithinRel(1.000756204, 1e-7));

    const auto params10 = params_for_ratio(10.0);
    const PumpSpec pump10{pump_sigma_from_fwhm(5.0 * params10.kappa_p), 0.0};
    const auto cn10 = converged_schmidt_number(params10, pump10, 129, 1e-5);
    REQUIRE(cn10.n_final == 257);
    REQUIRE_THAT(cn10.k, WithinRel(1.000050937948, 1e-9));

    REQUIRE_THROWS_AS(converged_schmidt_number(params, pump, 128, 1e-5), BadGridSpec);
    REQUIRE_THROWS_AS(converged_schmidt_number(params, pump, 129, 0.0), Error);
}

TEST_CASE("ladder cap reports the best available estimate", "[schmidt]") {
    const auto params = params_for_ratio(1.0);
    const PumpSpec narrow{pump_sigma_from_fwhm(0.05 * params.kappa_p), 0.0};
    LadderOptions capped;
    capped.max_n = 257;
    REQUIRE_THROWS_AS(converged_schmidt_number(params, narrow, 129, 1e-5, capped),
                      NoConvergence);
    try {
        converged_schmidt_number(params, narrow, 129, 1e-5, capped);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        REQUIRE(e.n_final == 257);
        REQUIRE_THAT(e.best_k, WithinRel(4.931086439723, 1e-9));
        REQUIRE_THAT(e.achieved_error, WithinRel(4.931086439723 - 3.960710592681, 1e-6));
    }

    // cap below the first refinement: no error estimate exists yet
    LadderOptions tight;
    tight.max_n = 129;
    try {
        converged_schmidt_number(params, narrow, 129, 1e-5, tight);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        REQUIRE(e.n_final == 129);
        REQUIRE_THAT(e.best_k, WithinRel(3.960710592681, 1e-9));
        REQUIRE(std::isnan(e.achieved_error));
    }
}

TEST_CASE("full converged decomposition matches the ladder", "[schmidt]") {
    const auto params = params_for_ratio(1.0);
    const PumpSpec pump{pump_sigma_from_fwhm(20.0 * params.kappa_p), 0.0};
    const auto cs = converged_schmidt(params, pump, 129, 1e-3);
    REQUIRE(cs.n_final == 257);
    REQUIRE_THAT(cs.result.schmidt_number, WithinRel(1.078994750158, 1e-9));
    REQUIRE(cs.result.idler_modes.has_value() == false);
}

TEST_CASE("requested mode functions diagonalize the weighted kernel", "[schmidt]") {
    const auto amp = gaussian_pair_kernel(65);
    const auto res = schmidt_decompose(amp, true);
    REQUIRE(res.idler_modes.has_value());
    REQUIRE(res.signal_modes.has_value());
    const auto& u = *res.idler_modes;
    const auto& v = *res.signal_modes;
    REQUIRE(u.rows() == 65);
    REQUIRE(v.rows() == 65);
    REQUIRE(u.cols() == res.n_retained);
    REQUIRE(v.cols() == res.n_retained);

    int strong = 0;
    while (strong < res.n_retained && res.coefficients[strong] > 1e-8)
        ++strong;

    // orthonormality among the well-conditioned modes; the idler side is the
    // derived one (A v / s) so rounding grows with 1/s, hence the looser bound
    for (int m = 0; m < strong; ++m)
        for (int n2 = 0; n2 < strong; ++n2) {
            const double expect = m == n2 ? 1.0 : 0.0;
            REQUIRE_THAT(std::abs((u.col(m).adjoint() * u.col(n2))(0, 0)),
                         WithinAbs(expect, 1e-7));
            REQUIRE_THAT(std::abs((v.col(m).adjoint() * v.col(n2))(0, 0)),
                         WithinAbs(expect, 1e-10));
        }

    // truncated reconstruction of the weighted kernel
    const Eigen::MatrixXcd a = detail::weighted_kernel(amp);
    const double norm_a = a.norm();
    Eigen::MatrixXcd rec = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
    for (int m = 0; m < strong; ++m) {
        const double s = std::sqrt(res.coefficients[m]) * norm_a;
        rec += s * u.col(m) * v.col(m).adjoint();
    }
    REQUIRE((a - rec).norm() / norm_a < 2e-4);
}
