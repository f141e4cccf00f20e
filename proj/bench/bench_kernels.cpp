// Wall-clock comparison of the OpenMP kernels against the serial reference
// implementations. Usage: conjresp_bench [points] [steps]

#include "conjresp/dynamics.hpp"
#include "conjresp/exactness.hpp"
#include "conjresp/flow.hpp"
#include "conjresp/reference.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>

using namespace conjresp;
using clock_type = std::chrono::steady_clock;

template <class F>
double seconds(F&& f) {
    auto t0 = clock_type::now();
    f();
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int main(int argc, char** argv) {
    const int n_points = argc > 1 ? std::atoi(argv[1]) : 2000;
    const int steps = argc > 2 ? std::atoi(argv[2]) : 64;

    TorusGrid grid = TorusGrid::square(16);
    ScalarField rho = ScalarField::sample(grid, [](const Vec& p) {
        return std::cos(kTwoPi * p[0]) + 0.5 * std::sin(kTwoPi * (p[0] + 2 * p[1]));
    });
    VectorField x = solve_for_field(rho, VolumeDensity::lebesgue(grid), SolutionStrategy::canonical());

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec> pts(static_cast<std::size_t>(n_points));
    for (auto& p : pts) p = {u(rng), u(rng)};

    std::cout << "threads: " << omp_get_max_threads() << ", points: " << n_points << ", steps: " << steps << "\n";

    FlowEvaluation fast, slow;
    double t_fast = seconds([&] { fast = integrate_flow(x, 0.3, pts, steps); });
    double t_slow = seconds([&] { slow = reference::integrate_flow(x, 0.3, pts, steps); });
    double diff = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (int c = 0; c < 2; ++c) diff = std::max(diff, std::abs(fast.lifts[i][c] - slow.lifts[i][c]));
    std::cout << "flow      parallel " << t_fast << " s  serial reference " << t_slow << " s  speedup "
              << t_slow / t_fast << "  max diff " << diff << "\n";

    TorusGrid line = TorusGrid::line(256);
    TorusMap doubling = make_linear(line, IntMat{{{2, 0}, {0, 1}}});
    VolumeDensity eta = VolumeDensity::lebesgue(line);
    double r_fast = 0.0, r_slow = 0.0;
    double tf = seconds([&] { r_fast = perron_frobenius_residual(BaseMapLift(doubling), eta.eta(), 256); });
    double ts = seconds([&] {
        r_slow = reference::transfer_residual(
            [&](double z) {
                Mat d;
                Vec y;
                doubling.evaluate({z, 0.0}, y, d);
                return std::make_pair(y[0], d[0][0]);
            },
            2, eta.eta(), 256);
    });
    std::cout << "transfer  parallel " << tf << " s  serial reference " << ts << " s  residuals " << r_fast
              << " / " << r_slow << "\n";
    return 0;
}
