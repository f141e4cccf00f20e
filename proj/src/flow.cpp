#include "conjresp/flow.hpp"

#include "conjresp/errors.hpp"

#include <cmath>
#include <memory>

namespace conjresp {

namespace {

struct State {
    Vec x;
    Mat j;
};

inline State advance(const State& s, double h, const Vec& v, const Mat& k) {
    State out = s;
    for (int i = 0; i < 2; ++i) {
        out.x[i] += h * v[i];
        for (int c = 0; c < 2; ++c) out.j[i][c] += h * k[i][c];
    }
    return out;
}

inline void slope(const FlowField& f, double s, const State& st, Vec& v, Mat& k) {
    Mat d;
    f.evaluate(s, st.x, v, d);
    k = mat_mul(d, st.j);
}

State rk4_path(const FlowField& f, double s0, double h, int steps, Vec start) {
    State st{start, identity_mat()};
    for (int n = 0; n < steps; ++n) {
        const double s = s0 + n * h;
        Vec v1, v2, v3, v4;
        Mat k1, k2, k3, k4;
        slope(f, s, st, v1, k1);
        slope(f, s + 0.5 * h, advance(st, 0.5 * h, v1, k1), v2, k2);
        slope(f, s + 0.5 * h, advance(st, 0.5 * h, v2, k2), v3, k3);
        slope(f, s + h, advance(st, h, v3, k3), v4, k4);
        for (int i = 0; i < 2; ++i) {
            st.x[i] += h / 6.0 * (v1[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            for (int c = 0; c < 2; ++c)
                st.j[i][c] += h / 6.0 * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c]);
        }
    }
    return st;
}

}  // namespace

int default_steps(const VectorField& x, double t) {
    return static_cast<int>(std::ceil(64.0 * std::max(1.0, x.max_norm() * std::abs(t))));
}

FlowEvaluation integrate(const FlowField& field, double s0, double s1, std::span<const Vec> points, int steps) {
    if (steps < 1) throw InvalidArgument("flow integration needs steps >= 1, got " + std::to_string(steps));
    FlowEvaluation out;
    out.dim = field.dim();
    out.time = s1 - s0;
    out.steps = steps;
    out.points.resize(points.size());
    out.lifts.resize(points.size());
    out.jacobians.resize(points.size());
    const double h = (s1 - s0) / steps;
    const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        State st = s1 == s0 ? State{points[idx], identity_mat()} : rk4_path(field, s0, h, steps, points[idx]);
        if (field.dim() == 1) {
            st.x[1] = points[idx][1];
            st.j[0][1] = st.j[1][0] = 0.0;
            st.j[1][1] = 1.0;
        }
        out.lifts[idx] = st.x;
        out.points[idx] = {wrap_unit(st.x[0]), field.dim() == 2 ? wrap_unit(st.x[1]) : 0.0};
        out.jacobians[idx] = st.j;
    }
    return out;
}

FlowEvaluation integrate_flow(const VectorField& x, double t, std::span<const Vec> points, int steps) {
    AutonomousField f(x);
    return integrate(f, 0.0, t, points, steps);
}

FlowEvaluation inverse_flow(const VectorField& x, double t, std::span<const Vec> points, int steps) {
    return integrate_flow(x, -t, points, steps);
}

ScalarField pushforward_from_inverse(const ScalarField& eta, const FlowEvaluation& inverse_at_grid) {
    const TorusGrid& g = eta.grid();
    if (inverse_at_grid.points.size() != g.points())
        throw InvalidArgument("pushforward: inverse map must be evaluated at every grid point");
    std::vector<double> at_preimage = interpolate(eta, inverse_at_grid.points);
    std::vector<double> out(g.points());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = at_preimage[i] * det(inverse_at_grid.jacobians[i], g.dim());
    return ScalarField(g, std::move(out));
}

class MoserTransport::PathField final : public FlowField {
public:
    PathField(const CoVectorForm& theta, const VolumeDensity& omega0, const VolumeDensity& omega1)
        : eta0_(omega0.eta()), eta1_(omega1.eta()), dim_(theta.dim()) {
        // Numerator W of X_s = W / eta_s: theta on T^1, (b, -a) on T^2.
        if (dim_ == 1) {
            numerator_.emplace_back(theta[0]);
        } else {
            numerator_.emplace_back(theta[1]);
            numerator_.emplace_back(-theta[0]);
        }
    }

    int dim() const override { return dim_; }

    void evaluate(double s, const Vec& x, Vec& v, Mat& d) const override {
        Vec g0, g1;
        const double e0 = eta0_.value_and_gradient(x, g0);
        const double e1 = eta1_.value_and_gradient(x, g1);
        const double eta = (1.0 - s) * e0 + s * e1;
        const Vec grad_eta{(1.0 - s) * g0[0] + s * g1[0], (1.0 - s) * g0[1] + s * g1[1]};
        v = {0.0, 0.0};
        d = Mat{};
        for (int i = 0; i < dim_; ++i) {
            Vec gw;
            const double w = numerator_[static_cast<std::size_t>(i)].value_and_gradient(x, gw);
            v[i] = w / eta;
            for (int j = 0; j < dim_; ++j) d[i][j] = gw[j] / eta - w * grad_eta[j] / (eta * eta);
        }
    }

private:
    Interpolant eta0_;
    Interpolant eta1_;
    std::vector<Interpolant> numerator_;
    int dim_;
};

MoserTransport::MoserTransport(VolumeDensity omega0, VolumeDensity omega1, int steps)
    : omega0_(std::move(omega0)),
      omega1_(std::move(omega1)),
      steps_(steps),
      theta_(solve_exactness(omega1_.eta() - omega0_.eta(), VolumeDensity::lebesgue(omega0_.grid()))) {
    if (!(omega0_.grid() == omega1_.grid())) throw InvalidArgument("Moser transport: density grids differ");
    if (steps < 1) throw InvalidArgument("Moser transport needs steps >= 1");
    field_ = std::make_shared<const PathField>(theta_, omega0_, omega1_);
}

FlowEvaluation MoserTransport::apply(std::span<const Vec> points) const {
    return integrate(*field_, 0.0, 1.0, points, steps_);
}

FlowEvaluation MoserTransport::apply_inverse(std::span<const Vec> points) const {
    return integrate(*field_, 1.0, 0.0, points, steps_);
}

ScalarField MoserTransport::pushforward_density() const {
    const auto grid_points = omega0_.grid().all_points();
    return pushforward_from_inverse(omega0_.eta(), apply_inverse(grid_points));
}

MoserTransport moser_transport(const VolumeDensity& omega0, const VolumeDensity& omega1, int steps) {
    return MoserTransport(omega0, omega1, steps);
}

}  // namespace conjresp
