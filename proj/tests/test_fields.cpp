#include "conjresp/errors.hpp"
#include "conjresp/field.hpp"
#include "conjresp/interpolant.hpp"
#include "conjresp/io.hpp"
#include "conjresp/reference.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace conjresp;

namespace {

double cos1(const Vec& p) { return std::cos(kTwoPi * p[0]); }

}  // namespace

TEST_CASE("grid validates resolution and samples left-closed") {
    CHECK_THROWS_AS(TorusGrid::line(6), InvalidArgument);
    CHECK_THROWS_AS(TorusGrid::line(15), InvalidArgument);
    CHECK_THROWS_AS(TorusGrid(3, {8, 8}), InvalidArgument);
    TorusGrid g = TorusGrid::square(8, 16);
    CHECK(g.points() == 128);
    CHECK(g.point(0) == Vec{0.0, 0.0});
    CHECK(g.point(17)[0] == doctest::Approx(1.0 / 8));
    CHECK(g.point(17)[1] == doctest::Approx(1.0 / 16));
}

TEST_CASE("spectrum of simple fields") {
    TorusGrid g = TorusGrid::line(16);
    SUBCASE("constant") {
        Spectrum s = to_spectral(ScalarField::constant(g, 1.0));
        CHECK(std::abs(s.at({0, 0}) - 1.0) < 1e-15);
        for (int k = 1; k <= 8; ++k) CHECK(std::abs(s.at({k, 0})) < 1e-15);
    }
    SUBCASE("single cosine") {
        Spectrum s = to_spectral(ScalarField::sample(g, cos1));
        CHECK(std::abs(s.at({1, 0}) - 0.5) <= 1e-14);
        CHECK(std::abs(s.at({-1, 0}) - 0.5) <= 1e-14);
        for (int k = -8; k <= 8; ++k)
            if (std::abs(k) != 1) CHECK(std::abs(s.at({k, 0})) <= 1e-14);
    }
}

TEST_CASE("spectral coefficients match direct summation and round trip") {
    for (int dim : {1, 2}) {
        TorusGrid g = dim == 1 ? TorusGrid::line(16) : TorusGrid::square(16);
        for (unsigned seed = 1; seed <= 3; ++seed) {
            ScalarField f = oracle::random_smooth(g, 5, seed);
            Spectrum s = to_spectral(f);
            for (int a = -8; a <= 8; ++a)
                for (int b = (dim == 2 ? -8 : 0); b <= (dim == 2 ? 8 : 0); ++b)
                    CHECK(std::abs(s.at({a, b}) - oracle::dft_coefficient(f, {a, b})) <= 1e-13);
            ScalarField back = from_spectral(s);
            CHECK(oracle::max_diff(back, f) <= 1e-12 * max_abs(f));
            CHECK(std::abs(mean(f) - s.at({0, 0}).real()) <= 1e-12);
        }
    }
}

TEST_CASE("derivative") {
    TorusGrid g = TorusGrid::line(32);
    ScalarField d = derivative(ScalarField::sample(g, cos1), 0);
    CHECK(oracle::max_diff_to(d, [](const Vec& p) { return -kTwoPi * std::sin(kTwoPi * p[0]); }) <= 1e-12);
    CHECK(max_abs(derivative(ScalarField::constant(g, 3.0), 0)) <= 1e-14);
    CHECK_THROWS_AS(derivative(ScalarField::constant(g, 3.0), 1), InvalidArgument);

    TorusGrid g2 = TorusGrid::square(32);
    ScalarField f2 = ScalarField::sample(g2, [](const Vec& p) {
        return std::sin(kTwoPi * p[0]) * std::cos(2 * kTwoPi * p[1]);
    });
    ScalarField dy = derivative(f2, 1);
    CHECK(oracle::max_diff_to(dy, [](const Vec& p) {
              return -2 * kTwoPi * std::sin(kTwoPi * p[0]) * std::sin(2 * kTwoPi * p[1]);
          }) <= 1e-11);
}

TEST_CASE("derivative is resolution independent on band-limited input") {
    for (int dim : {1, 2}) {
        TorusGrid coarse = dim == 1 ? TorusGrid::line(16) : TorusGrid::square(16);
        TorusGrid fine = dim == 1 ? TorusGrid::line(32) : TorusGrid::square(32);
        ScalarField fc = oracle::random_smooth(coarse, 4, 11);
        ScalarField ff = oracle::random_smooth(fine, 4, 11);
        for (int axis = 0; axis < dim; ++axis) {
            ScalarField dc = derivative(fc, axis);
            ScalarField df = derivative(ff, axis);
            double m = 0.0;
            for (std::size_t i = 0; i < dc.size(); ++i) {
                Vec p = coarse.point(i);
                std::size_t j = dim == 1 ? 2 * i
                                         : static_cast<std::size_t>(std::lround(p[0] * 32)) * 32 +
                                               static_cast<std::size_t>(std::lround(p[1] * 32));
                m = std::max(m, std::abs(dc[i] - df[j]));
            }
            CHECK(m <= 1e-11);
        }
    }
}

TEST_CASE("derivatives of periodic fields have zero mean") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        TorusGrid g = trial % 2 ? TorusGrid::square(16) : TorusGrid::line(64);
        std::vector<double> v(g.points());
        for (auto& x : v) x = u(rng);
        ScalarField f(g, v);
        for (int a = 0; a < g.dim(); ++a) CHECK(std::abs(mean(derivative(f, a))) <= 1e-12);
    }
}

TEST_CASE("interpolation") {
    TorusGrid g = TorusGrid::line(16);
    std::vector<Vec> p{{0.3, 0.0}, {1.3, 0.0}, {-0.7, 0.0}};
    auto v = interpolate(ScalarField::sample(g, cos1), p);
    for (double x : v) CHECK(std::abs(x - std::cos(0.3 * kTwoPi)) <= 1e-13);

    SUBCASE("collocation on white noise") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int dim : {1, 2}) {
            TorusGrid gg = dim == 1 ? TorusGrid::line(32) : TorusGrid::square(16, 8);
            std::vector<double> vals(gg.points());
            for (auto& x : vals) x = u(rng);
            ScalarField f(gg, vals);
            auto at = interpolate(f, gg.all_points());
            for (std::size_t i = 0; i < at.size(); ++i) CHECK(std::abs(at[i] - vals[i]) <= 1e-12);
        }
    }

    SUBCASE("smooth bump self-consistency across resolutions") {
        auto bump = [](const Vec& x) {
            return std::exp(-std::pow(std::sin(kTwoPi / 2 * x[0]), 2) / 0.1 -
                            std::pow(std::sin(kTwoPi / 2 * x[1]), 2) / 0.1);
        };
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<Vec> pts(100);
        for (auto& q : pts) q = {u(rng), u(rng)};
        for (int dim : {1, 2}) {
            auto grid_of = [dim](int n) { return dim == 1 ? TorusGrid::line(n) : TorusGrid::square(n); };
            auto f64 = interpolate(ScalarField::sample(grid_of(64), bump), pts);
            auto f128 = interpolate(ScalarField::sample(grid_of(128), bump), pts);
            for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(f64[i] - f128[i]) <= 1e-9);
        }
    }
}

TEST_CASE("pruned interpolant agrees with the serial reference") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int dim : {1, 2}) {
        TorusGrid g = dim == 1 ? TorusGrid::line(32) : TorusGrid::square(16);
        ScalarField f = oracle::random_smooth(g, 6, 4);
        Interpolant fast(f);
        Spectrum s = to_spectral(f);
        for (int i = 0; i < 50; ++i) {
            Vec x{u(rng), dim == 2 ? u(rng) : 0.0};
            Vec g_fast, g_ref;
            double a = fast.value_and_gradient(x, g_fast);
            double b = reference::evaluate(s, x, &g_ref);
            CHECK(std::abs(a - b) <= 1e-12);
            CHECK(std::abs(g_fast[0] - g_ref[0]) <= 1e-10);
            CHECK(std::abs(g_fast[1] - g_ref[1]) <= 1e-10);
        }
    }
}

TEST_CASE("pointwise algebra") {
    TorusGrid g = TorusGrid::line(32);
    ScalarField c = ScalarField::sample(g, cos1);
    CHECK(std::abs(mean(c)) <= 1e-14);

    ScalarField w = add_constant(0.5 * c, 1.0);
    CHECK(oracle::max_diff(quotient(w, w), ScalarField::constant(g, 1.0)) == 0.0);

    SUBCASE("product to sum") {
        ScalarField c2 = ScalarField::sample(g, [](const Vec& p) { return std::cos(2 * kTwoPi * p[0]); });
        Spectrum s = to_spectral(product(c, c2));
        // cos a cos b = (cos(a+b) + cos(a-b)) / 2
        CHECK(std::abs(s.at({1, 0}) - 0.25) <= 1e-15);
        CHECK(std::abs(s.at({3, 0}) - 0.25) <= 1e-15);
        CHECK(std::abs(s.at({2, 0})) <= 1e-15);
        CHECK(std::abs(s.at({0, 0})) <= 1e-15);
    }

    SUBCASE("quotient positivity guard") {
        ScalarField bad = add_constant(c, 0.5);
        try {
            (void)quotient(c, bad);
            FAIL("expected DomainError");
        } catch (const DomainError& e) {
            CHECK(e.min_value() == doctest::Approx(-0.5));
            CHECK(e.location() == 16);
            CHECK(std::string(e.what()).find("minimum") != std::string::npos);
        }
    }
}

TEST_CASE("padded product removes aliasing") {
    TorusGrid g = TorusGrid::line(16);
    ScalarField c5 = ScalarField::sample(g, [](const Vec& p) { return std::cos(5 * kTwoPi * p[0]); });
    // cos^2(5 . 2 pi x) = 1/2 + cos(10 . 2 pi x)/2; mode 10 aliases to 6 on N = 16.
    Spectrum aliased = to_spectral(product(c5, c5));
    Spectrum clean = to_spectral(padded_product(c5, c5));
    CHECK(std::abs(aliased.at({6, 0}) - 0.25) <= 1e-14);
    CHECK(std::abs(clean.at({6, 0})) <= 1e-14);
    CHECK(std::abs(clean.at({0, 0}) - 0.5) <= 1e-14);

    ScalarField a = oracle::random_smooth(TorusGrid::square(16), 3, 2);
    ScalarField b = oracle::random_smooth(TorusGrid::square(16), 3, 8);
    CHECK(oracle::max_diff(padded_product(a, b), product(a, b)) <= 1e-12 * max_abs(product(a, b)));
}

TEST_CASE("volume density invariants") {
    TorusGrid g = TorusGrid::line(16);
    CHECK_NOTHROW(VolumeDensity(add_constant(0.5 * ScalarField::sample(g, cos1), 1.0)));
    CHECK_THROWS_AS(VolumeDensity(ScalarField::constant(g, 2.0)), NormalizationError);
    CHECK_THROWS_AS(VolumeDensity(add_constant(2.0 * ScalarField::sample(g, cos1), 1.0)), DomainError);
    VolumeDensity n = VolumeDensity::normalized(ScalarField::constant(g, 4.0));
    CHECK(mean(n.eta()) == doctest::Approx(1.0));
}

TEST_CASE("field serialization") {
    ScalarField f = oracle::random_smooth(TorusGrid::square(8, 16), 2, 1);
    auto j = io::field_to_json(f);
    CHECK(j["dim"] == 2);
    CHECK(j["resolution"] == nlohmann::json::array({8, 16}));
    ScalarField back = io::field_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.grid() == f.grid());
    CHECK(oracle::max_diff(back, f) == 0.0);

    std::ostringstream os;
    io::write_field_csv(os, ScalarField::sample(TorusGrid::line(8), cos1));
    std::istringstream lines(os.str());
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "x1,value");
    std::getline(lines, row);
    std::getline(lines, row);
    CHECK(row == "0.125,0.70710678118654757");
    CHECK(io::format_real(0.1) == "0.10000000000000001");
}
