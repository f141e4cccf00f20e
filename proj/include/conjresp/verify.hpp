#pragma once

#include "conjresp/dynamics.hpp"
#include "conjresp/field.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace conjresp {

/// Errors below this are treated as round-off and excluded from order fits.
inline constexpr double kNoiseFloor = 1e-11;
/// A sweep whose errors all sit below this is accepted without a fit.
inline constexpr double kFloorAcceptance = 1e-10;
inline constexpr double kMinOrder = 1.8;
inline constexpr double kMaxOrder = 2.3;
/// Tolerance on |mean(eta_t) - 1| for pushforward densities.
inline constexpr double kMassTolerance = 1e-8;

/// Outcome of a finite-difference convergence study in t.
struct ConvergenceReport {
    std::vector<double> t;
    std::vector<double> error;
    double fitted_order = 0.0;  // NaN when no fit was possible
    double constant = 0.0;      // error(t_min) / t_min^2
    bool passed = false;
    bool noise_floor = false;   // some errors hit round-off
    bool unreliable = false;    // not enough usable points for a fit
    std::string note;

    nlohmann::json to_json() const;
};

/// Least-squares slope of log(error) against log(t).
double fit_log_slope(const std::vector<double>& t, const std::vector<double>& error);

/// Applies the floor/monotonicity rules and order window to raw errors.
ConvergenceReport summarize_convergence(std::vector<double> t, std::vector<double> error);

/// eta_t(y) = eta(phi^{-t}(y)) det D phi^{-t}(y). Throws NumericalQualityError
/// if the mass drifts by more than kMassTolerance or positivity is lost.
VolumeDensity pushforward_density(const VolumeDensity& omega, const VectorField& x, double t, int steps = 0);

/// Central differences (eta_t - eta_{-t})/(2t) against rho*eta.
ConvergenceReport response_check(const VolumeDensity& omega, const ScalarField& rho, const VectorField& x,
                                 const std::vector<double>& t_values, int steps = 0);

/// Central differences of T_{+-t} against -DT(X) + X o T on the grid of X,
/// with torus differences taken on the shortest lift.
ConvergenceReport derivative_check(const TorusMap& map, const VectorField& x, const std::vector<double>& t_values,
                                   int steps = 0);

/// Perron-Frobenius fixed-point defect of eta_t under T_t (T^1 expanding maps).
double transfer_check(const DeformedMap& deformed, const VolumeDensity& eta_t, int resolution);

}  // namespace conjresp
