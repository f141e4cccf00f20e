#include "conjresp/reference.hpp"

#include "conjresp/errors.hpp"

#include <cmath>

namespace conjresp::reference {

double evaluate(const Spectrum& spectrum, const Vec& x, Vec* grad) {
    const TorusGrid& g = spectrum.grid();
    const int n0 = g.size(0);
    const int n1 = g.dim() == 2 ? g.size(1) : 1;
    double v = 0.0;
    Vec gr{0.0, 0.0};
    // Full symmetric range of wave numbers; the Nyquist index appears once.
    for (int a = -n0 / 2 + 1; a <= n0 / 2; ++a) {
        for (int b = (g.dim() == 2 ? -n1 / 2 + 1 : 0); b <= (g.dim() == 2 ? n1 / 2 : 0); ++b) {
            Complex c = spectrum.at({a, b});
            const double phase = kTwoPi * (a * x[0] + b * x[1]);
            const Complex e(std::cos(phase), std::sin(phase));
            const Complex term = c * e;
            v += term.real();
            gr[0] += -kTwoPi * a * term.imag();
            gr[1] += -kTwoPi * b * term.imag();
        }
    }
    if (grad) *grad = gr;
    return v;
}

std::vector<double> interpolate(const ScalarField& field, std::span<const Vec> points) {
    Spectrum s = to_spectral(field);
    std::vector<double> out;
    out.reserve(points.size());
    for (const Vec& p : points) out.push_back(evaluate(s, p));
    return out;
}

FlowEvaluation integrate_flow(const VectorField& x, double t, std::span<const Vec> points, int steps) {
    const int dim = x.dim();
    std::vector<Spectrum> spectra;
    for (const auto& c : x.components()) spectra.push_back(to_spectral(c));

    auto rhs = [&](const Vec& p, Vec& v, Mat& d) {
        v = {0.0, 0.0};
        d = Mat{};
        for (int i = 0; i < dim; ++i) {
            Vec gr;
            v[i] = evaluate(spectra[static_cast<std::size_t>(i)], p, &gr);
            d[i] = gr;
        }
    };

    FlowEvaluation out;
    out.dim = dim;
    out.time = t;
    out.steps = steps;
    const double h = t / steps;
    for (const Vec& start : points) {
        Vec p = start;
        Mat jac = identity_mat();
        for (int n = 0; n < steps && t != 0.0; ++n) {
            Vec v1, v2, v3, v4, q;
            Mat d1, d2, d3, d4, j;
            rhs(p, v1, d1);
            Mat k1 = mat_mul(d1, jac);
            for (int i = 0; i < 2; ++i) q[i] = p[i] + 0.5 * h * v1[i];
            for (int i = 0; i < 2; ++i)
                for (int c = 0; c < 2; ++c) j[i][c] = jac[i][c] + 0.5 * h * k1[i][c];
            rhs(q, v2, d2);
            Mat k2 = mat_mul(d2, j);
            for (int i = 0; i < 2; ++i) q[i] = p[i] + 0.5 * h * v2[i];
            for (int i = 0; i < 2; ++i)
                for (int c = 0; c < 2; ++c) j[i][c] = jac[i][c] + 0.5 * h * k2[i][c];
            rhs(q, v3, d3);
            Mat k3 = mat_mul(d3, j);
            for (int i = 0; i < 2; ++i) q[i] = p[i] + h * v3[i];
            for (int i = 0; i < 2; ++i)
                for (int c = 0; c < 2; ++c) j[i][c] = jac[i][c] + h * k3[i][c];
            rhs(q, v4, d4);
            Mat k4 = mat_mul(d4, j);
            for (int i = 0; i < 2; ++i) {
                p[i] += h / 6.0 * (v1[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
                for (int c = 0; c < 2; ++c)
                    jac[i][c] += h / 6.0 * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c]);
            }
        }
        if (dim == 1) {
            p[1] = start[1];
            jac[0][1] = jac[1][0] = 0.0;
            jac[1][1] = 1.0;
        }
        out.lifts.push_back(p);
        out.points.push_back({wrap_unit(p[0]), dim == 2 ? wrap_unit(p[1]) : 0.0});
        out.jacobians.push_back(jac);
    }
    return out;
}

double transfer_residual(const LiftFn& lift, int degree, const ScalarField& eta, int resolution) {
    if (degree < 2) throw PreconditionError("reference transfer residual needs an increasing lift of degree >= 2");
    Spectrum s = to_spectral(eta);
    const double l0 = lift(0.0).first;
    double residual = 0.0;
    for (int i = 0; i < resolution; ++i) {
        const double y = static_cast<double>(i) / resolution;
        double sum = 0.0;
        for (int j = 0; j < degree; ++j) {
            const double target = l0 + wrap_unit(y - l0) + j;
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (lift(mid).first < target)
                    lo = mid;
                else
                    hi = mid;
            }
            const double z = 0.5 * (lo + hi);
            sum += evaluate(s, {z, 0.0}) / std::abs(lift(z).second);
        }
        residual = std::max(residual, std::abs(sum - evaluate(s, {y, 0.0})));
    }
    return residual;
}

}  // namespace conjresp::reference
