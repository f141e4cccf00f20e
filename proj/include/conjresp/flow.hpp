#pragma once

#include "conjresp/exactness.hpp"
#include "conjresp/field.hpp"
#include "conjresp/interpolant.hpp"

#include <memory>
#include <span>
#include <vector>

namespace conjresp {

/// Points transported by a flow together with the flow's Jacobian there.
struct FlowEvaluation {
    int dim = 1;
    double time = 0.0;
    int steps = 0;
    std::vector<Vec> points;     // reduced to [0,1)^n
    std::vector<Vec> lifts;      // unreduced positions in R^n
    std::vector<Mat> jacobians;  // D phi^t at the input points
};

/// A possibly time-dependent smooth vector field with its spatial Jacobian.
class FlowField {
public:
    virtual ~FlowField() = default;
    virtual int dim() const = 0;
    virtual void evaluate(double s, const Vec& x, Vec& v, Mat& d) const = 0;
};

/// Autonomous field backed by a spectral interpolant.
class AutonomousField final : public FlowField {
public:
    explicit AutonomousField(const VectorField& x) : interp_(x) {}
    int dim() const override { return interp_.dim(); }
    void evaluate(double, const Vec& x, Vec& v, Mat& d) const override { interp_.evaluate(x, v, d); }

private:
    VectorInterpolant interp_;
};

/// ceil(64 * max(1, |X|_inf * |t|)).
int default_steps(const VectorField& x, double t);

/// Classical fourth-order integration of position and variational equation
/// D' = DX(phi) D from s0 to s1 in `steps` uniform substeps. Parallel over
/// points; each point's result is independent of the thread count.
FlowEvaluation integrate(const FlowField& field, double s0, double s1, std::span<const Vec> points, int steps);

/// phi^t(points) for the flow of X.
FlowEvaluation integrate_flow(const VectorField& x, double t, std::span<const Vec> points, int steps);
/// phi^{-t}(points), the flow of X for time -t.
FlowEvaluation inverse_flow(const VectorField& x, double t, std::span<const Vec> points, int steps);

/// Density eta(phi^{-1}(y)) * det D phi^{-1}(y) of the pushforward, given the
/// inverse map evaluated at the grid points of `eta`.
ScalarField pushforward_from_inverse(const ScalarField& eta, const FlowEvaluation& inverse_at_grid);

/// Time-1 map psi of the Moser path omega_s = (1-s) omega0 + s omega1, built
/// from X_s with i_{X_s} omega_s = theta and d(theta) = (eta0 - eta1) vol, so
/// that psi pushes omega0 to omega1.
class MoserTransport {
public:
    MoserTransport(VolumeDensity omega0, VolumeDensity omega1, int steps);

    int steps() const { return steps_; }
    const CoVectorForm& theta() const { return theta_; }
    const VolumeDensity& source() const { return omega0_; }
    const VolumeDensity& target() const { return omega1_; }

    FlowEvaluation apply(std::span<const Vec> points) const;
    FlowEvaluation apply_inverse(std::span<const Vec> points) const;
    /// Density of psi_* omega0 on the grid of omega0.
    ScalarField pushforward_density() const;

private:
    class PathField;
    VolumeDensity omega0_;
    VolumeDensity omega1_;
    int steps_;
    CoVectorForm theta_;
    std::shared_ptr<const PathField> field_;
};

MoserTransport moser_transport(const VolumeDensity& omega0, const VolumeDensity& omega1, int steps);

}  // namespace conjresp
