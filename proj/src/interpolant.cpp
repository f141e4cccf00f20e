#include "conjresp/interpolant.hpp"

#include <algorithm>
#include <cmath>

namespace conjresp {

namespace {

// e^{2 pi i k x} for k = 0..kmax. The recurrence is resynchronised with an
// exact evaluation every few steps to bound error growth in k.
void fill_powers(double x, int kmax, std::vector<Complex>& out) {
    out.resize(static_cast<std::size_t>(kmax) + 1);
    out[0] = 1.0;
    if (kmax == 0) return;
    const Complex w = std::polar(1.0, kTwoPi * x);
    for (int k = 1; k <= kmax; ++k) {
        out[static_cast<std::size_t>(k)] =
            (k % 32 == 0) ? std::polar(1.0, kTwoPi * k * x) : out[static_cast<std::size_t>(k - 1)] * w;
    }
}

inline Complex power(const std::vector<Complex>& table, int k) {
    return k >= 0 ? table[static_cast<std::size_t>(k)] : std::conj(table[static_cast<std::size_t>(-k)]);
}

thread_local std::vector<Complex> tls_powers0;
thread_local std::vector<Complex> tls_powers1;

}  // namespace

Interpolant::Interpolant(const ScalarField& field, double relative_cutoff) : dim_(field.grid().dim()) {
    const TorusGrid& g = field.grid();
    Spectrum s = to_spectral(field);
    auto data = s.data();
    double cmax = 0.0;
    for (const Complex& c : data) cmax = std::max(cmax, std::abs(c));
    const double cutoff = relative_cutoff * cmax;
    const int last_nyquist = g.size(g.dim() - 1) / 2;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (std::abs(data[i]) <= cutoff || data[i] == Complex(0.0)) continue;
        auto k = s.wave_vector(i);
        int k_last = dim_ == 1 ? k[0] : k[1];
        // Stored half of the last axis: interior modes stand for a conjugate pair.
        double weight = (k_last == 0 || k_last == last_nyquist) ? 1.0 : 2.0;
        terms_.push_back({k[0], k[1], weight * data[i].real(), weight * data[i].imag()});
        kmax0_ = std::max(kmax0_, std::abs(k[0]));
        kmax1_ = std::max(kmax1_, std::abs(k[1]));
    }
}

double Interpolant::value(const Vec& x) const {
    Vec unused;
    return value_and_gradient(x, unused);
}

double Interpolant::value_and_gradient(const Vec& x, Vec& grad) const {
    grad = {0.0, 0.0};
    if (terms_.empty()) return 0.0;
    fill_powers(wrap_unit(x[0]), kmax0_, tls_powers0);
    if (dim_ == 2) fill_powers(wrap_unit(x[1]), kmax1_, tls_powers1);
    double v = 0.0;
    double g0 = 0.0;
    double g1 = 0.0;
    for (const Term& t : terms_) {
        Complex e = power(tls_powers0, t.k0);
        if (dim_ == 2) e *= power(tls_powers1, t.k1);
        // Re((re + i im)(cos + i sin)) and the imaginary part for the gradient.
        const double real = t.re * e.real() - t.im * e.imag();
        const double imag = t.re * e.imag() + t.im * e.real();
        v += real;
        g0 -= t.k0 * imag;
        g1 -= t.k1 * imag;
    }
    grad = {kTwoPi * g0, kTwoPi * g1};
    return v;
}

VectorInterpolant::VectorInterpolant(const VectorField& field, double relative_cutoff) {
    for (const auto& c : field.components()) components_.emplace_back(c, relative_cutoff);
}

Vec VectorInterpolant::value(const Vec& x) const {
    Vec v{0.0, 0.0};
    for (std::size_t i = 0; i < components_.size(); ++i) v[i] = components_[i].value(x);
    return v;
}

void VectorInterpolant::evaluate(const Vec& x, Vec& v, Mat& d) const {
    v = {0.0, 0.0};
    d = Mat{};
    for (std::size_t i = 0; i < components_.size(); ++i) {
        Vec grad;
        v[i] = components_[i].value_and_gradient(x, grad);
        d[i] = grad;
    }
}

std::vector<double> interpolate(const ScalarField& field, std::span<const Vec> points) {
    Interpolant interp(field);
    std::vector<double> out(points.size());
    const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Vec& p = points[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = interp.value(p);
    }
    return out;
}

}  // namespace conjresp
