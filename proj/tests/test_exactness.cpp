#include "conjresp/errors.hpp"
#include "conjresp/exactness.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace conjresp;

namespace {

constexpr double k4Pi2 = kTwoPi * kTwoPi;

ScalarField cosx(const TorusGrid& g) {
    return ScalarField::sample(g, [](const Vec& p) { return std::cos(kTwoPi * p[0]); });
}

// 1 + 0.5 cos(2 pi x), plus a y-dependent part on T^2.
VolumeDensity bumpy_density(const TorusGrid& g) {
    return VolumeDensity(ScalarField::sample(g, [&g](const Vec& p) {
        double v = 1.0 + 0.5 * std::cos(kTwoPi * p[0]);
        if (g.dim() == 2) v += 0.2 * std::sin(kTwoPi * (p[0] + p[1]));
        return v;
    }));
}

// rho minus its omega-mean, so that the integral of rho against omega vanishes.
ScalarField centered(const ScalarField& rho, const VolumeDensity& omega) {
    return add_constant(rho, -mean(product(rho, omega.eta())));
}

}  // namespace

TEST_CASE("solve_laplace") {
    TorusGrid g = TorusGrid::line(32);
    ScalarField u = solve_laplace(-cosx(g));
    CHECK(oracle::max_diff_to(u, [](const Vec& p) { return std::cos(kTwoPi * p[0]) / k4Pi2; }) <= 1e-15);
    CHECK(max_abs(solve_laplace(ScalarField::zero(g))) == 0.0);

    TorusGrid g2 = TorusGrid::square(16);
    ScalarField f2 = ScalarField::sample(g2, [](const Vec& p) {
        return std::sin(kTwoPi * p[0]) + std::sin(kTwoPi * p[1]);
    });
    CHECK(oracle::max_diff_to(solve_laplace(f2), [](const Vec& p) {
              return -(std::sin(kTwoPi * p[0]) + std::sin(kTwoPi * p[1])) / k4Pi2;
          }) <= 1e-15);
    ScalarField r = oracle::random_smooth(g2, 4, 2);
    r = add_constant(r, -mean(r));
    CHECK(oracle::max_diff(laplacian(solve_laplace(r)), r) <= 1e-12 * max_abs(r));

    try {
        (void)solve_laplace(ScalarField::constant(g, 0.1));
        FAIL("expected NormalizationError");
    } catch (const NormalizationError& e) {
        CHECK(e.mean() == doctest::Approx(0.1));
    }
}

TEST_CASE("solve_exactness") {
    SUBCASE("T1 zero-mean antiderivative") {
        TorusGrid g = TorusGrid::line(32);
        VolumeDensity leb = VolumeDensity::lebesgue(g);
        CoVectorForm theta = solve_exactness(cosx(g), leb);
        CHECK(oracle::max_diff_to(theta[0], [](const Vec& p) { return -std::sin(kTwoPi * p[0]) / kTwoPi; }) <= 1e-13);
        CHECK(max_abs(exterior_derivative(theta) + cosx(g)) <= 1e-13);
        CHECK(max_abs(solve_exactness(ScalarField::zero(g), leb)[0]) == 0.0);
    }
    SUBCASE("T2 gradient contraction") {
        TorusGrid g = TorusGrid::square(32);
        CoVectorForm theta = solve_exactness(cosx(g), VolumeDensity::lebesgue(g));
        CHECK(max_abs(theta[0]) <= 1e-15);
        CHECK(oracle::max_diff_to(theta[1], [](const Vec& p) { return -std::sin(kTwoPi * p[0]) / kTwoPi; }) <= 1e-12);
        CHECK(max_abs(exterior_derivative(theta) + cosx(g)) <= 1e-12);
    }
    SUBCASE("mean-zero gate") {
        TorusGrid g = TorusGrid::line(32);
        VolumeDensity eta = bumpy_density(g);
        // cos is not mean-zero against 1 + 0.5 cos: the integral is 1/4.
        try {
            (void)solve_exactness(cosx(g), eta);
            FAIL("expected NormalizationError");
        } catch (const NormalizationError& e) {
            CHECK(e.mean() == doctest::Approx(0.25));
            CHECK(std::string(e.what()).find("mean-zero") != std::string::npos);
        }
        CHECK_NOTHROW(solve_exactness(centered(cosx(g), eta), eta));
    }
    SUBCASE("residual on random band-limited data") {
        for (int dim : {1, 2}) {
            TorusGrid g = dim == 1 ? TorusGrid::line(64) : TorusGrid::square(32);
            VolumeDensity eta = bumpy_density(g);
            for (unsigned seed = 1; seed <= 3; ++seed) {
                ScalarField rho = centered(oracle::random_smooth(g, 3, seed), eta);
                ScalarField source = product(rho, eta.eta());
                CoVectorForm theta = solve_exactness(rho, eta);
                CHECK(max_abs(exterior_derivative(theta) + source) <= 1e-10 * std::max(1.0, max_abs(source)));
            }
        }
    }
}

TEST_CASE("add_closed_form") {
    TorusGrid g = TorusGrid::line(16);
    CoVectorForm theta = solve_exactness(cosx(g), VolumeDensity::lebesgue(g));
    CoVectorForm same = add_closed_form(theta, SolutionStrategy::custom({0.0}));
    CHECK(oracle::max_diff(same[0], theta[0]) == 0.0);

    CoVectorForm one = add_closed_form(CoVectorForm::zero(g), SolutionStrategy::custom({1.0}));
    CHECK(oracle::max_diff(one[0], ScalarField::constant(g, 1.0)) == 0.0);
    CHECK(max_abs(exterior_derivative(one)) <= 1e-15);

    TorusGrid g2 = TorusGrid::square(16);
    // alpha = sin(2 pi y) = Re(-i e^{2 pi i y})
    SolutionStrategy s = SolutionStrategy::custom({0.0, 0.0}, {Mode{{0, 1}, Complex(0.0, -1.0)}});
    CoVectorForm t2 = add_closed_form(CoVectorForm::zero(g2), s);
    CHECK(max_abs(t2[0]) <= 1e-14);
    CHECK(oracle::max_diff_to(t2[1], [](const Vec& p) { return kTwoPi * std::cos(kTwoPi * p[1]); }) <= 1e-12);
    CHECK(max_abs(exterior_derivative(t2)) <= 1e-12);

    // d(theta') = d(theta) for any closed addition.
    VolumeDensity leb2 = VolumeDensity::lebesgue(g2);
    CoVectorForm base = solve_exactness(centered(oracle::random_smooth(g2, 2, 3), leb2), leb2);
    SolutionStrategy mixed = SolutionStrategy::custom({0.3, -0.2}, {Mode{{1, 2}, Complex(0.4, 0.1)}});
    CHECK(oracle::max_diff(exterior_derivative(add_closed_form(base, mixed)), exterior_derivative(base)) <= 1e-12);

    CHECK_THROWS_AS(add_closed_form(theta, SolutionStrategy::custom({1.0, 2.0})), InvalidArgument);
    CHECK_THROWS_AS(add_closed_form(theta, SolutionStrategy::custom({1.0}, {Mode{{0, 1}, 1.0}})), InvalidArgument);
}

TEST_CASE("contract_inverse") {
    TorusGrid g = TorusGrid::line(16);
    VolumeDensity leb = VolumeDensity::lebesgue(g);
    CoVectorForm theta = solve_exactness(cosx(g), leb);
    VectorField x = contract_inverse(theta, leb);
    CHECK(oracle::max_diff_to(x[0], [](const Vec& p) { return -std::sin(kTwoPi * p[0]) / kTwoPi; }) <= 1e-14);
    CHECK(max_abs(contract_inverse(CoVectorForm::zero(g), leb)[0]) == 0.0);

    TorusGrid g2 = TorusGrid::square(16);
    VolumeDensity leb2 = VolumeDensity::lebesgue(g2);
    VectorField x2 = contract_inverse(solve_exactness(cosx(g2), leb2), leb2);
    CHECK(oracle::max_diff_to(x2[0], [](const Vec& p) { return -std::sin(kTwoPi * p[0]) / kTwoPi; }) <= 1e-14);
    CHECK(max_abs(x2[1]) <= 1e-15);
    // Recompute i_X omega by the component formula: (-eta X^2) dx + (eta X^1) dy.
    CoVectorForm again = contract(x2, leb2);
    CHECK(oracle::max_diff(again[1], solve_exactness(cosx(g2), leb2)[1]) <= 1e-15);

    SUBCASE("round trip with a non-constant density") {
        for (int dim : {1, 2}) {
            TorusGrid gg = dim == 1 ? TorusGrid::line(32) : TorusGrid::square(16);
            VolumeDensity eta = bumpy_density(gg);
            std::vector<ScalarField> comps;
            for (int a = 0; a < dim; ++a) comps.push_back(oracle::random_smooth(gg, 3, 10 + a));
            CoVectorForm th(comps);
            CoVectorForm back = contract(contract_inverse(th, eta), eta);
            for (int a = 0; a < dim; ++a) CHECK(oracle::max_diff(back[a], th[a]) <= 1e-12);
        }
    }
}

TEST_CASE("lie_derivative_density") {
    TorusGrid g = TorusGrid::line(32);
    VolumeDensity leb = VolumeDensity::lebesgue(g);
    CHECK(max_abs(lie_derivative_density(VectorField::zero(g), leb)) == 0.0);
    VectorField x({ScalarField::sample(g, [](const Vec& p) { return -std::sin(kTwoPi * p[0]) / kTwoPi; })});
    CHECK(max_abs(lie_derivative_density(x, leb) + cosx(g)) <= 1e-13);

    TorusGrid g2 = TorusGrid::square(32);
    ScalarField psi = oracle::random_smooth(g2, 4, 6);
    VectorField swirl({derivative(psi, 1), -derivative(psi, 0)});
    CHECK(max_abs(lie_derivative_density(swirl, VolumeDensity::lebesgue(g2))) <= 1e-11);
}

TEST_CASE("solve_weighted_poisson") {
    TorusGrid g = TorusGrid::line(256);
    VolumeDensity leb = VolumeDensity::lebesgue(g);
    ScalarField u = solve_weighted_poisson(leb, -cosx(g));
    CHECK(oracle::max_diff_to(u, [](const Vec& p) { return std::cos(kTwoPi * p[0]) / k4Pi2; }) <= 1e-12);
    CHECK(max_abs(solve_weighted_poisson(leb, ScalarField::zero(g))) == 0.0);

    SUBCASE("manufactured solution") {
        VolumeDensity eta = bumpy_density(g);
        ScalarField u_true = ScalarField::sample(g, [](const Vec& p) { return std::sin(kTwoPi * p[0]); });
        ScalarField rhs = weighted_laplacian(eta.eta(), u_true);
        PoissonStats stats;
        ScalarField got = solve_weighted_poisson(eta, rhs, 1e-10, &stats);
        CHECK(oracle::max_diff(got, u_true) <= 1e-8);
        CHECK(stats.relative_residual <= 1e-10);
        CHECK(stats.iterations <= 10 * 256);

        TorusGrid g2 = TorusGrid::square(64);
        VolumeDensity eta2 = bumpy_density(g2);
        ScalarField u2 = oracle::random_smooth(g2, 3, 4);
        u2 = add_constant(u2, -mean(u2));
        ScalarField got2 = solve_weighted_poisson(eta2, weighted_laplacian(eta2.eta(), u2));
        CHECK(oracle::max_diff(got2, u2) <= 1e-8);
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(solve_weighted_poisson(leb, ScalarField::constant(g, 1.0)), NormalizationError);
        CHECK_THROWS_AS(solve_weighted_poisson(leb, -cosx(g), 0.0), InvalidArgument);
        // The Nyquist mode lies outside the range of the discrete operator.
        ScalarField nyquist = ScalarField::sample(g, [](const Vec& p) { return std::cos(kTwoPi * 128 * p[0]); });
        try {
            (void)solve_weighted_poisson(leb, nyquist);
            FAIL("expected ConvergenceError");
        } catch (const ConvergenceError& e) {
            CHECK(e.residual() > 1e-10);
        }
    }
}

TEST_CASE("solve_for_field") {
    TorusGrid g = TorusGrid::line(64);
    VolumeDensity leb = VolumeDensity::lebesgue(g);
    auto expected = [](const Vec& p) { return -std::sin(kTwoPi * p[0]) / kTwoPi; };
    CHECK(oracle::max_diff_to(solve_for_field(cosx(g), leb, SolutionStrategy::canonical())[0], expected) <= 1e-12);
    CHECK(oracle::max_diff_to(solve_for_field(cosx(g), leb, SolutionStrategy::gradient())[0], expected) <= 1e-12);
    CHECK(max_abs(solve_for_field(ScalarField::zero(g), leb, SolutionStrategy::canonical())[0]) == 0.0);

    SUBCASE("response identity and weighted divergence-free differences") {
        for (int dim : {1, 2}) {
            TorusGrid gg = dim == 1 ? TorusGrid::line(128) : TorusGrid::square(32);
            VolumeDensity eta = bumpy_density(gg);
            std::vector<SolutionStrategy> strategies{SolutionStrategy::canonical(), SolutionStrategy::gradient()};
            if (dim == 1)
                strategies.push_back(SolutionStrategy::custom({0.1}));
            else
                strategies.push_back(SolutionStrategy::custom({0.1, -0.3}, {Mode{{0, 1}, Complex(0.0, -1.0)}}));
            for (unsigned seed = 1; seed <= 2; ++seed) {
                ScalarField rho = centered(oracle::random_smooth(gg, 3, seed), eta);
                ScalarField source = product(rho, eta.eta());
                VectorField canonical = solve_for_field(rho, eta, strategies[0]);
                for (const auto& s : strategies) {
                    FieldSolution sol = solve_for_field_detailed(rho, eta, s);
                    CHECK(sol.residual <= 1e-8 * max_abs(source));
                    CHECK(max_abs(lie_derivative_density(canonical - sol.field, eta)) <= 1e-8 * max_abs(source));
                }
            }
        }
    }

    SUBCASE("custom constants on T1 add c / eta") {
        TorusGrid gg = TorusGrid::line(64);
        VolumeDensity eta = bumpy_density(gg);
        ScalarField rho = centered(cosx(gg), eta);
        VectorField x = solve_for_field(rho, eta, SolutionStrategy::canonical());
        VectorField y = solve_for_field(rho, eta, SolutionStrategy::custom({0.1}));
        CHECK(oracle::max_diff(y[0] - x[0], quotient(ScalarField::constant(gg, 0.1), eta.eta())) <= 1e-14);
    }
}
