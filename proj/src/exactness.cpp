#include "conjresp/exactness.hpp"

#include "conjresp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conjresp {

namespace {

void require_mean_zero(const ScalarField& f, const char* what) {
    double m = mean(f);
    if (std::abs(m) > kMeanZeroTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << " must integrate to zero (mean-zero requirement), actual mean " << m;
        throw NormalizationError(msg.str(), m);
    }
}

double full_symbol(const std::array<int, 2>& k) {
    return -kTwoPi * kTwoPi * (static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1]);
}

// Symbol of sum_a D_a D_a where D_a annihilates the axis-a Nyquist mode.
double derivative_symbol(const std::array<int, 2>& k, const TorusGrid& g) {
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        int ka = k[static_cast<std::size_t>(a)];
        if (std::abs(ka) != g.size(a) / 2) s += static_cast<double>(ka) * ka;
    }
    return -kTwoPi * kTwoPi * s;
}

// Applies the pseudo-inverse of the derivative-consistent Laplacian; also
// serves as the projection of the PCG residual onto the operator's range.
ScalarField inverse_derivative_laplacian(const ScalarField& f) {
    Spectrum s = to_spectral(f);
    auto data = s.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        double sym = derivative_symbol(s.wave_vector(i), f.grid());
        data[i] = sym == 0.0 ? Complex(0.0) : data[i] / sym;
    }
    return from_spectral(s);
}

ScalarField project_to_range(const ScalarField& f) {
    Spectrum s = to_spectral(f);
    auto data = s.data();
    for (std::size_t i = 0; i < data.size(); ++i)
        if (derivative_symbol(s.wave_vector(i), f.grid()) == 0.0) data[i] = 0.0;
    return from_spectral(s);
}

double dot(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

ScalarField axpy(double alpha, const ScalarField& x, const ScalarField& y) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * x[i] + y[i];
    return ScalarField(x.grid(), std::move(out));
}

}  // namespace

ScalarField solve_laplace(const ScalarField& f) {
    require_mean_zero(f, "Poisson right-hand side");
    Spectrum s = to_spectral(f);
    auto data = s.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        double sym = full_symbol(s.wave_vector(i));
        data[i] = sym == 0.0 ? Complex(0.0) : data[i] / sym;
    }
    return from_spectral(s);
}

ScalarField laplacian(const ScalarField& u) {
    Spectrum s = to_spectral(u);
    auto data = s.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= full_symbol(s.wave_vector(i));
    return from_spectral(s);
}

CoVectorForm solve_exactness(const ScalarField& rho, const VolumeDensity& omega) {
    if (!(rho.grid() == omega.grid())) throw InvalidArgument("solve_exactness: rho and omega grids differ");
    ScalarField source = product(rho, omega.eta());
    require_mean_zero(source, "rho * omega");
    ScalarField u = solve_laplace(-source);
    if (rho.grid().dim() == 1) return CoVectorForm({derivative(u, 0)});
    // i_{grad u}(dx ^ dy) = u_x dy - u_y dx
    return CoVectorForm({-derivative(u, 1), derivative(u, 0)});
}

CoVectorForm add_closed_form(const CoVectorForm& theta, const SolutionStrategy& strategy) {
    const TorusGrid& g = theta.grid();
    if (strategy.kind != SolutionStrategy::Kind::custom) return theta;
    if (!strategy.harmonic.empty() && static_cast<int>(strategy.harmonic.size()) != g.dim())
        throw InvalidArgument("custom strategy needs " + std::to_string(g.dim()) +
                              " harmonic coefficient(s), got " + std::to_string(strategy.harmonic.size()));
    if (g.dim() == 1 && !strategy.alpha_modes.empty())
        throw InvalidArgument("custom strategy: alpha potential is only defined on T^2");

    std::vector<ScalarField> c = theta.components();
    for (std::size_t a = 0; a < strategy.harmonic.size(); ++a)
        c[a] = add_constant(c[a], strategy.harmonic[a]);
    if (!strategy.alpha_modes.empty()) {
        ScalarField alpha = from_modes(g, strategy.alpha_modes);
        c[0] = c[0] + derivative(alpha, 0);
        c[1] = c[1] + derivative(alpha, 1);
    }
    return CoVectorForm(std::move(c));
}

VectorField contract_inverse(const CoVectorForm& theta, const VolumeDensity& omega) {
    const ScalarField& eta = omega.eta();
    if (theta.dim() == 1) return VectorField({quotient(theta[0], eta)});
    return VectorField({quotient(theta[1], eta), quotient(-theta[0], eta)});
}

CoVectorForm contract(const VectorField& x, const VolumeDensity& omega) {
    const ScalarField& eta = omega.eta();
    if (x.dim() == 1) return CoVectorForm({product(eta, x[0])});
    return CoVectorForm({-product(eta, x[1]), product(eta, x[0])});
}

ScalarField lie_derivative_density(const VectorField& x, const VolumeDensity& omega) {
    std::vector<ScalarField> flux;
    for (const auto& c : x.components()) flux.push_back(product(omega.eta(), c));
    return divergence(VectorField(std::move(flux)));
}

ScalarField weighted_laplacian(const ScalarField& eta, const ScalarField& u) {
    std::vector<ScalarField> flux;
    for (int a = 0; a < u.grid().dim(); ++a) flux.push_back(product(eta, derivative(u, a)));
    return divergence(VectorField(std::move(flux)));
}

ScalarField solve_weighted_poisson(const VolumeDensity& omega, const ScalarField& g, double tol,
                                   PoissonStats* stats) {
    if (!(tol > 0.0)) throw InvalidArgument("weighted Poisson tolerance must be positive");
    if (!(g.grid() == omega.grid())) throw InvalidArgument("weighted Poisson: grids differ");
    require_mean_zero(g, "weighted Poisson right-hand side");

    const ScalarField& eta = omega.eta();
    const double scale = max_abs(g);
    const TorusGrid& grid = g.grid();
    if (scale == 0.0) {
        if (stats) *stats = {};
        return ScalarField::zero(grid);
    }
    const double target = tol * scale;
    const int cap = 10 * grid.max_size();

    // Solve A u = b with A = -div(eta grad .) (SPD on the range) and b = -g.
    const ScalarField b = project_to_range(-g);
    ScalarField u = ScalarField::zero(grid);
    ScalarField r = b;
    ScalarField z = -inverse_derivative_laplacian(r);
    ScalarField p = z;
    double rz = dot(r, z);
    int it = 0;
    double achieved = max_abs(r) / scale;

    while (it < cap) {
        if (max_abs(r) <= target) {
            // Confirm against the true residual before accepting.
            ScalarField true_r = b + weighted_laplacian(eta, u);
            achieved = max_abs(weighted_laplacian(eta, u) - g) / scale;
            if (achieved <= tol) break;
            r = true_r;
            z = -inverse_derivative_laplacian(r);
            p = z;
            rz = dot(r, z);
        }
        ScalarField ap = -weighted_laplacian(eta, p);
        double pap = dot(p, ap);
        if (pap <= 0.0) break;
        double alpha = rz / pap;
        u = axpy(alpha, p, u);
        r = axpy(-alpha, ap, r);
        z = -inverse_derivative_laplacian(r);
        double rz_next = dot(r, z);
        p = axpy(rz_next / rz, p, z);
        rz = rz_next;
        ++it;
    }
    achieved = max_abs(weighted_laplacian(eta, u) - g) / scale;
    if (stats) *stats = {it, achieved};
    if (achieved > tol) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "weighted Poisson solver did not reach tolerance " << tol << " in " << it
            << " iterations (cap " << cap << "), relative residual " << achieved;
        throw ConvergenceError(msg.str(), achieved);
    }
    // Pin the additive constant.
    return add_constant(u, -mean(u));
}

FieldSolution solve_for_field_detailed(const ScalarField& rho, const VolumeDensity& omega,
                                       const SolutionStrategy& strategy, double poisson_tol) {
    if (!(rho.grid() == omega.grid())) throw InvalidArgument("solve_for_field: rho and omega grids differ");
    const ScalarField source = product(rho, omega.eta());
    require_mean_zero(source, "rho * omega");

    std::optional<CoVectorForm> theta;
    std::optional<ScalarField> potential;
    std::optional<VectorField> field;
    switch (strategy.kind) {
        case SolutionStrategy::Kind::gradient: {
            ScalarField u = solve_weighted_poisson(omega, -source, poisson_tol);
            field = gradient(u);
            potential = std::move(u);
            break;
        }
        case SolutionStrategy::Kind::canonical:
        case SolutionStrategy::Kind::custom: {
            if (strategy.kind == SolutionStrategy::Kind::canonical) potential = solve_laplace(-source);
            theta = add_closed_form(solve_exactness(rho, omega), strategy);
            field = contract_inverse(*theta, omega);
            break;
        }
    }
    FieldSolution out{std::move(*field), std::move(theta), std::move(potential), 0.0, max_abs(source)};
    out.residual = max_abs(lie_derivative_density(out.field, omega) + source);
    if (out.residual > kFieldResidualTolerance * out.scale) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "conjugating field misses the response identity: max|div(eta X) + rho eta| = " << out.residual
            << " exceeds " << kFieldResidualTolerance << " * " << out.scale;
        throw NumericalQualityError(msg.str(), out.residual);
    }
    return out;
}

VectorField solve_for_field(const ScalarField& rho, const VolumeDensity& omega,
                            const SolutionStrategy& strategy) {
    return solve_for_field_detailed(rho, omega, strategy).field;
}

}  // namespace conjresp
