#pragma once

// Serial reference kernels. They trade speed for directness: every Fourier
// mode is kept and evaluated with its own sine/cosine, loops are plain, and
// no OpenMP is used. Tests and the benchmark compare the production kernels
// against these.

#include "conjresp/field.hpp"
#include "conjresp/flow.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace conjresp::reference {

/// Direct evaluation of the full trigonometric interpolant and its gradient.
double evaluate(const Spectrum& spectrum, const Vec& x, Vec* grad = nullptr);

std::vector<double> interpolate(const ScalarField& field, std::span<const Vec> points);

/// Serial RK4 for position and Jacobian of the flow of X.
FlowEvaluation integrate_flow(const VectorField& x, double t, std::span<const Vec> points, int steps);

/// Lift value and slope at z.
using LiftFn = std::function<std::pair<double, double>(double)>;

/// Serial point-by-point transfer residual for an increasing lift of degree d >= 2.
double transfer_residual(const LiftFn& lift, int degree, const ScalarField& eta, int resolution);

}  // namespace conjresp::reference
