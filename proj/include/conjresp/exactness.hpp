#pragma once

#include "conjresp/field.hpp"

#include <optional>
#include <vector>

namespace conjresp {

/// Which member of the affine space of conjugating fields to return.
///  - canonical: theta = i_{grad u}(vol) with Laplacian(u) = -rho*eta;
///  - gradient:  X = grad u with div(eta grad u) = -rho*eta;
///  - custom:    canonical theta plus a closed form (harmonic constants and,
///               on T^2, an exact part d(alpha)).
struct SolutionStrategy {
    enum class Kind { canonical, gradient, custom };

    Kind kind = Kind::canonical;
    std::vector<double> harmonic;   // custom: one coefficient per axis
    std::vector<Mode> alpha_modes;  // custom, T^2 only

    static SolutionStrategy canonical() { return {}; }
    static SolutionStrategy gradient() { return {Kind::gradient, {}, {}}; }
    static SolutionStrategy custom(std::vector<double> harmonic, std::vector<Mode> alpha = {}) {
        return {Kind::custom, std::move(harmonic), std::move(alpha)};
    }
};

/// Mean-zero tolerance for the integral of rho against omega.
inline constexpr double kMeanZeroTolerance = 1e-10;
/// Relative bound on max|div(eta X) + rho eta| for a produced field.
inline constexpr double kFieldResidualTolerance = 1e-8;

/// Zero-mean u with Laplacian(u) = f, by mode-wise division by -4 pi^2 |k|^2.
ScalarField solve_laplace(const ScalarField& f);
/// Spectral Laplacian with the full symbol -4 pi^2 |k|^2.
ScalarField laplacian(const ScalarField& u);

/// theta with d(theta) = -rho * eta * vol (canonical representative).
CoVectorForm solve_exactness(const ScalarField& rho, const VolumeDensity& omega);

/// theta + harmonic constants + d(alpha). Throws InvalidArgument for a
/// strategy that does not match the form's dimension.
CoVectorForm add_closed_form(const CoVectorForm& theta, const SolutionStrategy& strategy);

/// The X with i_X omega = theta: X = f/eta on T^1, X = (b, -a)/eta on T^2.
VectorField contract_inverse(const CoVectorForm& theta, const VolumeDensity& omega);
/// i_X omega: eta X on T^1, (-eta X^2) dx + (eta X^1) dy on T^2.
CoVectorForm contract(const VectorField& x, const VolumeDensity& omega);

/// Density of L_X omega = d(i_X omega) with respect to Lebesgue: div(eta X).
ScalarField lie_derivative_density(const VectorField& x, const VolumeDensity& omega);

/// div(eta grad u), with the same spectral derivatives the solver uses.
ScalarField weighted_laplacian(const ScalarField& eta, const ScalarField& u);

struct PoissonStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Zero-mean u with div(eta grad u) = g to relative sup-norm tolerance `tol`.
/// Preconditioned conjugate gradients with the constant-coefficient inverse
/// Laplacian as preconditioner, capped at 10 * max(N) iterations; throws
/// ConvergenceError carrying the achieved residual when the cap is hit.
ScalarField solve_weighted_poisson(const VolumeDensity& omega, const ScalarField& g, double tol = 1e-10,
                                   PoissonStats* stats = nullptr);

struct FieldSolution {
    VectorField field;
    std::optional<CoVectorForm> theta;     // canonical / custom
    std::optional<ScalarField> potential;  // u for canonical and gradient
    double residual = 0.0;                 // max |div(eta X) + rho eta|
    double scale = 0.0;                    // max |rho eta|
};

/// End-to-end construction of X with L_X omega = -rho omega. Throws
/// NumericalQualityError if the residual exceeds kFieldResidualTolerance.
FieldSolution solve_for_field_detailed(const ScalarField& rho, const VolumeDensity& omega,
                                       const SolutionStrategy& strategy, double poisson_tol = 1e-10);
VectorField solve_for_field(const ScalarField& rho, const VolumeDensity& omega,
                            const SolutionStrategy& strategy);

}  // namespace conjresp
