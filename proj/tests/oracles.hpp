#pragma once

// Test-only oracles, independent of the library's FFT and interpolation paths.

#include "conjresp/field.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using conjresp::Complex;
using conjresp::kTwoPi;
using conjresp::ScalarField;
using conjresp::TorusGrid;
using conjresp::Vec;

/// c_k = (1/N) sum_j f_j e^{-2 pi i k.x_j} by direct summation.
inline Complex dft_coefficient(const ScalarField& f, std::array<int, 2> k) {
    const TorusGrid& g = f.grid();
    Complex sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        Vec x = g.point(j);
        sum += f[j] * std::polar(1.0, -kTwoPi * (k[0] * x[0] + k[1] * x[1]));
    }
    return sum / static_cast<double>(f.size());
}

/// Band-limited random field with modes |k_i| <= kmax, deterministic in seed.
inline ScalarField random_smooth(const TorusGrid& g, int kmax, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<std::array<double, 4>> terms;
    for (int a = -kmax; a <= kmax; ++a)
        for (int b = (g.dim() == 2 ? -kmax : 0); b <= (g.dim() == 2 ? kmax : 0); ++b) {
            const double decay = std::exp(-0.3 * (a * a + b * b));
            terms.push_back({double(a), double(b), decay * n(rng), decay * n(rng)});
        }
    return ScalarField::sample(g, [&](const Vec& x) {
        double s = 0.0;
        for (auto& t : terms) {
            const double ph = kTwoPi * (t[0] * x[0] + t[1] * x[1]);
            s += t[2] * std::cos(ph) + t[3] * std::sin(ph);
        }
        return s;
    });
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_diff_fn(const ScalarField& a, double (*f)(const Vec&)) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - f(a.grid().point(i))));
    return m;
}

template <class F>
double max_diff_to(const ScalarField& a, F f) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - f(a.grid().point(i))));
    return m;
}

}  // namespace oracle
