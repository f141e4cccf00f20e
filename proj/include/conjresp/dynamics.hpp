#pragma once

#include "conjresp/field.hpp"
#include "conjresp/flow.hpp"
#include "conjresp/interpolant.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace conjresp {

using IntMat = std::array<std::array<int, 2>, 2>;

/// Lift derivative of an expanding circle map must stay above 1 + this.
inline constexpr double kExpansionMargin = 1e-3;
/// Invariance certificate threshold for constructed (T, eta) pairs.
inline constexpr double kCertificateTolerance = 1e-6;

/// T(x) = A x + g(x) mod 1 with integer A and periodic displacement g, plus a
/// density eta that T is known (or trusted) to preserve.
class TorusMap {
public:
    enum class Family { linear, warped_doubling, custom };

    TorusMap(int dim, IntMat linear, std::optional<VectorField> displacement, VolumeDensity density,
             Family family, bool certified, double certificate_residual);

    int dim() const { return dim_; }
    const IntMat& linear_part() const { return linear_; }
    const std::optional<VectorField>& displacement() const { return displacement_; }
    const VolumeDensity& density() const { return density_; }
    Family family() const { return family_; }
    bool certified() const { return certified_; }
    double certificate_residual() const { return certificate_residual_; }
    /// det A: the topological degree.
    int degree() const;

    /// A x + g(x) without reduction; x may be any lift.
    Vec lift(const Vec& x) const;
    Vec operator()(const Vec& x) const;
    /// D_x T = A + Dg(x).
    Mat jacobian(const Vec& x) const;
    void evaluate(const Vec& x, Vec& lifted, Mat& jac) const;

private:
    int dim_;
    IntMat linear_;
    std::optional<VectorField> displacement_;
    std::shared_ptr<const VectorInterpolant> disp_interp_;
    VolumeDensity density_;
    Family family_;
    bool certified_;
    double certificate_residual_;
};

std::string family_name(TorusMap::Family f);

/// Linear endomorphism (preserves Lebesgue). Throws InvalidArgument if det A = 0.
TorusMap make_linear(const TorusGrid& grid, const IntMat& a);
TorusMap make_linear(const TorusGrid& grid, const std::vector<std::vector<int>>& a);

/// T = h o D o h^{-1}, D the doubling map and h the time-1 flow of the
/// generator; eta = (h^{-1})' normalised. Throws ConstructionError if the
/// Perron-Frobenius certificate exceeds kCertificateTolerance.
TorusMap make_warped_doubling(const VectorField& generator);

/// User-supplied (T, eta). Certified by transfer sums for expanding maps of
/// T^1 (ConstructionError on failure); accepted on trust otherwise.
TorusMap make_custom(const IntMat& a, const VectorField& displacement, const VolumeDensity& density);

/// T_t = phi^t o T o phi^{-t} for the flow of `field`.
struct DeformedMap {
    TorusMap base;
    VectorField field;
    double t = 0.0;
    int steps = 0;  // 0 selects default_steps(field, t)
};

struct MapEvaluation {
    std::vector<Vec> points;  // reduced
    std::vector<Vec> lifts;
    std::vector<Mat> jacobians;
};

/// Lifted values and Jacobians of T_t; identical to the base map at t = 0.
MapEvaluation evaluate_deformed(const DeformedMap& map, std::span<const Vec> points);
std::vector<Vec> deformed_map_eval(const DeformedMap& map, std::span<const Vec> points);

/// dT_t/dt at t = 0: -D_xT(X_x) + X_{T(x)}, on the grid of X.
VectorField deformation_derivative(const TorusMap& map, const VectorField& x);

struct InvarianceDefect {
    ScalarField magnitude;  // |D_xT(V_x) - V_{T(x)}| per grid point
    double sup = 0.0;
};
InvarianceDefect invariance_defect(const TorusMap& map, const VectorField& v);

/// A lifted circle map L with L(z + 1) = L(z) + degree, evaluated in batches.
class CircleLift {
public:
    /// L = F o B o F^{-1} with B a base map and F a circle diffeomorphism.
    /// Preimages of L are then F(B^{-1}(F^{-1}(y))), which only needs
    /// bisection on B.
    struct Conjugacy {
        const TorusMap* base;
        std::function<FlowEvaluation(std::span<const Vec>)> forward;
        std::function<FlowEvaluation(std::span<const Vec>)> inverse;
    };

    virtual ~CircleLift() = default;
    virtual int degree() const = 0;
    virtual void evaluate(std::span<const double> z, std::span<double> value, std::span<double> slope) const = 0;
    virtual std::optional<Conjugacy> conjugacy() const { return std::nullopt; }
};

/// Lift of a base map on T^1.
class BaseMapLift final : public CircleLift {
public:
    explicit BaseMapLift(const TorusMap& map);
    int degree() const override { return map_.degree(); }
    void evaluate(std::span<const double> z, std::span<double> value, std::span<double> slope) const override;

private:
    const TorusMap& map_;
};

/// Lift of a deformed map on T^1.
class DeformedMapLift final : public CircleLift {
public:
    explicit DeformedMapLift(const DeformedMap& map) : map_(map) {}
    int degree() const override { return map_.base.degree(); }
    void evaluate(std::span<const double> z, std::span<double> value, std::span<double> slope) const override;
    std::optional<Conjugacy> conjugacy() const override;

private:
    const DeformedMap& map_;
};

/// Lift of psi o T o psi^{-1} for a Moser transport psi on T^1.
class MoserConjugateLift final : public CircleLift {
public:
    MoserConjugateLift(const TorusMap& map, const MoserTransport& psi) : map_(map), psi_(psi) {}
    int degree() const override { return map_.degree(); }
    void evaluate(std::span<const double> z, std::span<double> value, std::span<double> slope) const override;
    std::optional<Conjugacy> conjugacy() const override;

private:
    const TorusMap& map_;
    const MoserTransport& psi_;
};

/// Bisection iterations per preimage branch.
inline constexpr int kBisectionIterations = 60;

/// sup_y |sum_{z in L^{-1}(y)} eta(z)/|L'(z)| - eta(y)| over the `resolution`
/// uniform points y. Preimages come from monotone bisection on each of the
/// degree branches (of the base map when the lift exposes a conjugacy). Throws PreconditionError when |L'| drops below
/// `min_slope` on the sample (by default: not uniformly expanding) or a
/// branch fails to bracket. Conjugates of expanding maps are coverings but
/// need not expand pointwise; pass a small positive `min_slope` for those.
double perron_frobenius_residual(const CircleLift& map, const ScalarField& eta, int resolution,
                                 double min_slope = 1.0 + kExpansionMargin);

}  // namespace conjresp
