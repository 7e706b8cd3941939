// Prints the relative delay T/T(0) for couplings around the optimum, as a
// TSV stream ready for plotting.
#include <cstdio>

#include "ringsfwm/core.hpp"
#include "ringsfwm/transfer.hpp"

int main() {
    using namespace ringsfwm;
    const double kappa = 1.0;
    const auto grid = make_grid(0.0, kappa, 257);

    std::vector<std::vector<double>> curves;
    for (double factor : {0.9, 1.0, 1.1}) {
        ResonatorParams p;
        p.kappa_p = kappa;
        p.kappa_is = kappa;
        p.g_p = factor * optimal_coupling(kappa);
        p.g_is = p.g_p;
        auto rel = delay_function(trace(p, grid, Channel::pump));
        const double t0 = rel[grid.center_index()];
        for (double& v : rel)
            v /= t0;
        curves.push_back(std::move(rel));
    }

    std::printf("# detuning/kappa\trel_delay_g0.9\trel_delay_g1.0\trel_delay_g1.1\n");
    for (int i = 0; i < grid.n_points; ++i)
        std::printf("%.6f\t%.9f\t%.9f\t%.9f\n", grid.points[i] / kappa, curves[0][i],
                    curves[1][i], curves[2][i]);
    return 0;
}
