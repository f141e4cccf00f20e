#include "conjresp/verify.hpp"

#include "conjresp/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace conjresp {

namespace {

void require_decreasing_positive(const std::vector<double>& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0)) throw InvalidArgument("t values must be positive");
        if (i > 0 && !(t[i] < t[i - 1])) throw InvalidArgument("t values must be strictly decreasing");
    }
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

nlohmann::json ConvergenceReport::to_json() const {
    return {{"t", t},
            {"error", error},
            {"fitted_order", number_or_null(fitted_order)},
            {"constant", number_or_null(constant)},
            {"passed", passed},
            {"noise_floor", noise_floor},
            {"unreliable", unreliable},
            {"note", note}};
}

double fit_log_slope(const std::vector<double>& t, const std::vector<double>& error) {
    const auto n = static_cast<double>(t.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x = std::log(t[i]);
        const double y = std::log(error[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport summarize_convergence(std::vector<double> t, std::vector<double> error) {
    ConvergenceReport r;
    r.t = std::move(t);
    r.error = std::move(error);
    r.fitted_order = std::numeric_limits<double>::quiet_NaN();
    const double t_min = r.t.back();
    r.constant = r.error.back() / (t_min * t_min);

    if (r.t.size() < 3) {
        r.unreliable = true;
        r.note = "order fit needs at least 3 values of t";
        return r;
    }

    // Usable prefix: above the floor and still decreasing with t.
    std::vector<double> ut, ue;
    for (std::size_t i = 0; i < r.t.size(); ++i) {
        if (r.error[i] <= kNoiseFloor || (!ue.empty() && r.error[i] >= ue.back())) {
            r.noise_floor = true;
            break;
        }
        ut.push_back(r.t[i]);
        ue.push_back(r.error[i]);
    }
    double max_err = 0.0;
    for (double e : r.error) max_err = std::max(max_err, e);

    if (ut.size() >= 3) {
        r.fitted_order = fit_log_slope(ut, ue);
        r.passed = r.fitted_order >= kMinOrder && r.fitted_order <= kMaxOrder;
        std::ostringstream msg;
        msg << "fitted order " << r.fitted_order << " over " << ut.size() << " points";
        if (!r.passed) msg << ", outside [" << kMinOrder << ", " << kMaxOrder << "]";
        r.note = msg.str();
    } else if (r.noise_floor && max_err <= kFloorAcceptance) {
        r.passed = true;
        r.note = "errors at round-off level; no order to fit";
    } else {
        r.unreliable = true;
        r.note = "too few usable points for an order fit";
    }
    return r;
}

VolumeDensity pushforward_density(const VolumeDensity& omega, const VectorField& x, double t, int steps) {
    if (!(omega.grid() == x.grid())) throw InvalidArgument("pushforward_density: grids differ");
    if (t == 0.0) return omega;
    const int n_steps = steps > 0 ? steps : default_steps(x, t);
    const auto pts = omega.grid().all_points();
    ScalarField eta_t = pushforward_from_inverse(omega.eta(), inverse_flow(x, t, pts, n_steps));
    const double mass = mean(eta_t);
    if (std::abs(mass - 1.0) > kMassTolerance) {
        std::ostringstream msg;
        msg << "pushforward density lost mass: |mean - 1| = " << std::abs(mass - 1.0);
        throw NumericalQualityError(msg.str(), std::abs(mass - 1.0));
    }
    const double lowest = min_value(eta_t);
    if (!(lowest > 0.0)) {
        std::ostringstream msg;
        msg << "pushforward density lost positivity: minimum " << lowest;
        throw NumericalQualityError(msg.str(), lowest);
    }
    // Renormalise the O(1e-8) quadrature drift so the result is a density.
    return VolumeDensity::normalized(eta_t);
}

ConvergenceReport response_check(const VolumeDensity& omega, const ScalarField& rho, const VectorField& x,
                                 const std::vector<double>& t_values, int steps) {
    if (t_values.empty()) throw InvalidArgument("response_check needs at least one t");
    require_decreasing_positive(t_values);
    const ScalarField target = product(rho, omega.eta());
    std::vector<double> errors;
    for (double t : t_values) {
        VolumeDensity plus = pushforward_density(omega, x, t, steps);
        VolumeDensity minus = pushforward_density(omega, x, -t, steps);
        ScalarField fd = (0.5 / t) * (plus.eta() - minus.eta());
        errors.push_back(max_abs(fd - target));
    }
    return summarize_convergence(t_values, std::move(errors));
}

ConvergenceReport derivative_check(const TorusMap& map, const VectorField& x, const std::vector<double>& t_values,
                                   int steps) {
    if (t_values.empty()) throw InvalidArgument("derivative_check needs at least one t");
    require_decreasing_positive(t_values);
    const VectorField expected = deformation_derivative(map, x);
    const auto pts = x.grid().all_points();
    std::vector<double> errors;
    for (double t : t_values) {
        auto plus = evaluate_deformed({map, x, t, steps}, pts);
        auto minus = evaluate_deformed({map, x, -t, steps}, pts);
        double e = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (int c = 0; c < x.dim(); ++c) {
                const double diff = shortest_lift(plus.points[i][c] - minus.points[i][c]) / (2.0 * t);
                e = std::max(e, std::abs(diff - expected[c][i]));
            }
        errors.push_back(e);
    }
    return summarize_convergence(t_values, std::move(errors));
}

double transfer_check(const DeformedMap& deformed, const VolumeDensity& eta_t, int resolution) {
    if (deformed.base.dim() != 1 || std::abs(deformed.base.degree()) < 2)
        throw PreconditionError("transfer_check applies to expanding maps of T^1 only");
    return perron_frobenius_residual(DeformedMapLift(deformed), eta_t.eta(), resolution);
}

}  // namespace conjresp
