#include "conjresp/dynamics.hpp"

#include "conjresp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conjresp {

TorusMap::TorusMap(int dim, IntMat linear, std::optional<VectorField> displacement, VolumeDensity density,
                   Family family, bool certified, double certificate_residual)
    : dim_(dim),
      linear_(linear),
      displacement_(std::move(displacement)),
      density_(std::move(density)),
      family_(family),
      certified_(certified),
      certificate_residual_(certificate_residual) {
    if (dim != 1 && dim != 2) throw InvalidArgument("torus map dimension must be 1 or 2");
    if (dim == 1) linear_[0][1] = linear_[1][0] = 0, linear_[1][1] = 1;
    if (degree() == 0) throw InvalidArgument("torus map linear part is singular (det A = 0)");
    if (density_.grid().dim() != dim) throw InvalidArgument("torus map density has the wrong dimension");
    if (displacement_) {
        if (displacement_->dim() != dim) throw InvalidArgument("torus map displacement has the wrong dimension");
        disp_interp_ = std::make_shared<const VectorInterpolant>(*displacement_);
    }
}

int TorusMap::degree() const {
    return dim_ == 1 ? linear_[0][0] : linear_[0][0] * linear_[1][1] - linear_[0][1] * linear_[1][0];
}

void TorusMap::evaluate(const Vec& x, Vec& lifted, Mat& jac) const {
    lifted = {0.0, 0.0};
    jac = Mat{};
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            lifted[i] += linear_[i][j] * x[j];
            jac[i][j] = linear_[i][j];
        }
    if (disp_interp_) {
        Vec g;
        Mat dg;
        disp_interp_->evaluate(x, g, dg);
        for (int i = 0; i < dim_; ++i) {
            lifted[i] += g[i];
            for (int j = 0; j < dim_; ++j) jac[i][j] += dg[i][j];
        }
    }
    if (dim_ == 1) jac[1][1] = 1.0;
}

Vec TorusMap::lift(const Vec& x) const {
    Vec y;
    Mat d;
    evaluate(x, y, d);
    return y;
}

Vec TorusMap::operator()(const Vec& x) const {
    Vec y = lift(x);
    return {wrap_unit(y[0]), dim_ == 2 ? wrap_unit(y[1]) : 0.0};
}

Mat TorusMap::jacobian(const Vec& x) const {
    Vec y;
    Mat d;
    evaluate(x, y, d);
    return d;
}

std::string family_name(TorusMap::Family f) {
    switch (f) {
        case TorusMap::Family::linear: return "linear";
        case TorusMap::Family::warped_doubling: return "warped_doubling";
        case TorusMap::Family::custom: return "custom";
    }
    return "custom";
}

TorusMap make_linear(const TorusGrid& grid, const IntMat& a) {
    IntMat m = a;
    int d = grid.dim() == 1 ? m[0][0] : m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (d == 0) throw InvalidArgument("linear map needs |det A| >= 1, got det A = 0");
    return TorusMap(grid.dim(), m, std::nullopt, VolumeDensity::lebesgue(grid), TorusMap::Family::linear, true,
                    0.0);
}

TorusMap make_linear(const TorusGrid& grid, const std::vector<std::vector<int>>& a) {
    const auto n = static_cast<std::size_t>(grid.dim());
    if (a.size() != n) throw InvalidArgument("linear part must be " + std::to_string(n) + "x" + std::to_string(n));
    IntMat m{};
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n)
            throw InvalidArgument("linear part must be " + std::to_string(n) + "x" + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j];
    }
    return make_linear(grid, m);
}

namespace {

bool is_expanding_circle_candidate(const TorusMap& map) {
    return map.dim() == 1 && std::abs(map.degree()) >= 2;
}

}  // namespace

TorusMap make_warped_doubling(const VectorField& generator) {
    const TorusGrid& grid = generator.grid();
    if (grid.dim() != 1) throw InvalidArgument("warped doubling needs a generator on T^1");
    const int steps = std::max(256, default_steps(generator, 1.0));
    const auto pts = grid.all_points();

    // h^{-1} at the grid: its Jacobian is the density of h_* Lebesgue.
    FlowEvaluation inv = inverse_flow(generator, 1.0, pts, steps);
    std::vector<double> eta(grid.points());
    std::vector<Vec> doubled(grid.points());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        eta[i] = inv.jacobians[i][0][0];
        doubled[i] = {2.0 * inv.lifts[i][0], 0.0};
    }
    FlowEvaluation fwd = integrate_flow(generator, 1.0, doubled, steps);
    std::vector<double> g(grid.points());
    for (std::size_t i = 0; i < pts.size(); ++i) g[i] = fwd.lifts[i][0] - 2.0 * pts[i][0];

    IntMat a{{{2, 0}, {0, 1}}};
    VectorField disp({ScalarField(grid, std::move(g))});
    VolumeDensity density = VolumeDensity::normalized(ScalarField(grid, std::move(eta)));
    TorusMap trial(1, a, disp, density, TorusMap::Family::warped_doubling, false, 0.0);
    // h D h^{-1} is a degree-2 covering but expands only in the metric pulled back by h.
    const double residual =
        perron_frobenius_residual(BaseMapLift(trial), density.eta(), grid.size(0), kExpansionMargin);
    if (residual > kCertificateTolerance) {
        std::ostringstream msg;
        msg << "warped doubling failed its invariance certificate: transfer residual " << residual << " > "
            << kCertificateTolerance;
        throw ConstructionError(msg.str(), residual);
    }
    return TorusMap(1, a, std::move(disp), std::move(density), TorusMap::Family::warped_doubling, true, residual);
}

TorusMap make_custom(const IntMat& a, const VectorField& displacement, const VolumeDensity& density) {
    const int dim = displacement.dim();
    TorusMap trial(dim, a, displacement, density, TorusMap::Family::custom, false, 0.0);
    if (!is_expanding_circle_candidate(trial)) return trial;
    const double residual =
        perron_frobenius_residual(BaseMapLift(trial), density.eta(), density.grid().size(0));
    if (residual > kCertificateTolerance) {
        std::ostringstream msg;
        msg << "custom map does not preserve the given density: transfer residual " << residual << " > "
            << kCertificateTolerance;
        throw ConstructionError(msg.str(), residual);
    }
    return TorusMap(dim, a, displacement, density, TorusMap::Family::custom, true, residual);
}

MapEvaluation evaluate_deformed(const DeformedMap& map, std::span<const Vec> points) {
    const TorusMap& base = map.base;
    const int steps = map.steps > 0 ? map.steps : default_steps(map.field, map.t);
    MapEvaluation out;
    out.points.resize(points.size());
    out.lifts.resize(points.size());
    out.jacobians.resize(points.size());

    if (map.t == 0.0) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            base.evaluate(points[i], out.lifts[i], out.jacobians[i]);
            out.points[i] = {wrap_unit(out.lifts[i][0]), base.dim() == 2 ? wrap_unit(out.lifts[i][1]) : 0.0};
        }
        return out;
    }

    AutonomousField field(map.field);
    FlowEvaluation back = integrate(field, 0.0, -map.t, points, steps);
    std::vector<Vec> mid(points.size());
    std::vector<Mat> mid_jac(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) base.evaluate(back.lifts[i], mid[i], mid_jac[i]);
    FlowEvaluation fwd = integrate(field, 0.0, map.t, mid, steps);
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.lifts[i] = fwd.lifts[i];
        out.points[i] = fwd.points[i];
        out.jacobians[i] = mat_mul(fwd.jacobians[i], mat_mul(mid_jac[i], back.jacobians[i]));
    }
    return out;
}

std::vector<Vec> deformed_map_eval(const DeformedMap& map, std::span<const Vec> points) {
    return evaluate_deformed(map, points).points;
}

VectorField deformation_derivative(const TorusMap& map, const VectorField& x) {
    if (map.dim() != x.dim()) throw InvalidArgument("deformation_derivative: dimension mismatch");
    const TorusGrid& grid = x.grid();
    VectorInterpolant xi(x);
    std::vector<std::vector<double>> comp(static_cast<std::size_t>(x.dim()), std::vector<double>(grid.points()));
    const auto n = static_cast<std::ptrdiff_t>(grid.points());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Vec p = grid.point(i);
        Vec tp;
        Mat dt;
        map.evaluate(p, tp, dt);
        const Vec xv{x[0][i], x.dim() == 2 ? x[1][i] : 0.0};
        const Vec push = mat_vec(dt, xv);
        const Vec at_image = xi.value(tp);
        for (int c = 0; c < x.dim(); ++c) comp[static_cast<std::size_t>(c)][i] = -push[c] + at_image[c];
    }
    std::vector<ScalarField> fields;
    for (auto& c : comp) fields.emplace_back(grid, std::move(c));
    return VectorField(std::move(fields));
}

InvarianceDefect invariance_defect(const TorusMap& map, const VectorField& v) {
    if (map.dim() != v.dim()) throw InvalidArgument("invariance_defect: dimension mismatch");
    const TorusGrid& grid = v.grid();
    VectorInterpolant vi(v);
    std::vector<double> mag(grid.points());
    const auto n = static_cast<std::ptrdiff_t>(grid.points());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Vec p = grid.point(i);
        Vec tp;
        Mat dt;
        map.evaluate(p, tp, dt);
        const Vec vv{v[0][i], v.dim() == 2 ? v[1][i] : 0.0};
        const Vec push = mat_vec(dt, vv);
        const Vec at_image = vi.value(tp);
        double s = 0.0;
        for (int c = 0; c < v.dim(); ++c) s += (push[c] - at_image[c]) * (push[c] - at_image[c]);
        mag[i] = std::sqrt(s);
    }
    ScalarField magnitude(grid, std::move(mag));
    double sup = max_abs(magnitude);
    return {std::move(magnitude), sup};
}

BaseMapLift::BaseMapLift(const TorusMap& map) : map_(map) {
    if (map.dim() != 1) throw PreconditionError("circle lift needs a map on T^1");
}

void BaseMapLift::evaluate(std::span<const double> z, std::span<double> value, std::span<double> slope) const {
    const auto n = static_cast<std::ptrdiff_t>(z.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        Vec y;
        Mat d;
        map_.evaluate({z[i], 0.0}, y, d);
        value[i] = y[0];
        slope[i] = d[0][0];
    }
}

void DeformedMapLift::evaluate(std::span<const double> z, std::span<double> value, std::span<double> slope) const {
    std::vector<Vec> pts(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) pts[i] = {z[i], 0.0};
    MapEvaluation e = evaluate_deformed(map_, pts);
    for (std::size_t i = 0; i < z.size(); ++i) {
        value[i] = e.lifts[i][0];
        slope[i] = e.jacobians[i][0][0];
    }
}

void MoserConjugateLift::evaluate(std::span<const double> z, std::span<double> value,
                                  std::span<double> slope) const {
    std::vector<Vec> pts(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) pts[i] = {z[i], 0.0};
    FlowEvaluation back = psi_.apply_inverse(pts);
    std::vector<Vec> mid(z.size());
    std::vector<double> mid_slope(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        Mat d;
        map_.evaluate(back.lifts[i], mid[i], d);
        mid_slope[i] = d[0][0];
    }
    FlowEvaluation fwd = psi_.apply(mid);
    for (std::size_t i = 0; i < z.size(); ++i) {
        value[i] = fwd.lifts[i][0];
        slope[i] = fwd.jacobians[i][0][0] * mid_slope[i] * back.jacobians[i][0][0];
    }
}

std::optional<CircleLift::Conjugacy> DeformedMapLift::conjugacy() const {
    if (map_.t == 0.0) return std::nullopt;
    const DeformedMap* m = &map_;
    const int steps = m->steps > 0 ? m->steps : default_steps(m->field, m->t);
    return Conjugacy{&m->base,
                     [m, steps](std::span<const Vec> p) { return integrate_flow(m->field, m->t, p, steps); },
                     [m, steps](std::span<const Vec> p) { return inverse_flow(m->field, m->t, p, steps); }};
}

std::optional<CircleLift::Conjugacy> MoserConjugateLift::conjugacy() const {
    const MoserTransport* psi = &psi_;
    return Conjugacy{&map_, [psi](std::span<const Vec> p) { return psi->apply(p); },
                     [psi](std::span<const Vec> p) { return psi->apply_inverse(p); }};
}

namespace {

// For each target y (in [0, 1)) the |degree| preimages z in [0, 1) of the
// lift, ordered by branch, with the lift slope there.
void bisect_preimages(const CircleLift& map, std::span<const double> ys, std::vector<double>& z,
                      std::vector<double>& slope) {
    const int d = map.degree();
    const int branches = std::abs(d);
    const double dir = d > 0 ? 1.0 : -1.0;
    double l0 = 0.0, s0 = 0.0, zero = 0.0;
    map.evaluate(std::span<const double>(&zero, 1), std::span<double>(&l0, 1), std::span<double>(&s0, 1));

    // Every target in the lifted range of [0, 1) has exactly one preimage there.
    const std::size_t m = ys.size();
    const std::size_t total = m * static_cast<std::size_t>(branches);
    std::vector<double> target(total), lo(total, 0.0), hi(total, 1.0), mid(total), lv(total);
    slope.assign(total, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double offset = dir > 0 ? wrap_unit(ys[i] - l0) : -wrap_unit(l0 - ys[i]);
        for (int j = 0; j < branches; ++j)
            target[i * static_cast<std::size_t>(branches) + static_cast<std::size_t>(j)] = l0 + offset + dir * j;
    }
    for (int it = 0; it < kBisectionIterations; ++it) {
        for (std::size_t k = 0; k < total; ++k) mid[k] = 0.5 * (lo[k] + hi[k]);
        map.evaluate(mid, lv, slope);
        for (std::size_t k = 0; k < total; ++k) {
            if (dir * (lv[k] - target[k]) < 0.0)
                lo[k] = mid[k];
            else
                hi[k] = mid[k];
        }
    }
    for (std::size_t k = 0; k < total; ++k) mid[k] = 0.5 * (lo[k] + hi[k]);
    map.evaluate(mid, lv, slope);
    for (std::size_t k = 0; k < total; ++k) {
        if (std::abs(lv[k] - target[k]) > 1e-8 * std::max(1.0, std::abs(slope[k]))) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "preimage bisection failed to bracket target " << target[k] << " (reached " << lv[k] << ")";
            throw PreconditionError(msg.str());
        }
    }
    z = std::move(mid);
}

}  // namespace

double perron_frobenius_residual(const CircleLift& map, const ScalarField& eta, int resolution, double min_slope) {
    if (eta.grid().dim() != 1) throw PreconditionError("transfer sums are implemented on T^1 only");
    if (resolution < 1) throw InvalidArgument("transfer resolution must be positive");
    const int d = map.degree();
    const int branches = std::abs(d);
    if (branches < 2) throw PreconditionError("transfer sums need an expanding circle map (|degree| >= 2)");
    const double dir = d > 0 ? 1.0 : -1.0;
    const auto m = static_cast<std::size_t>(resolution);
    const auto b = static_cast<std::size_t>(branches);

    // Expansion (or at least strict monotonicity) on the sample grid.
    std::vector<double> zs(m), vals(m), slopes(m);
    for (std::size_t i = 0; i < m; ++i) zs[i] = static_cast<double>(i) / resolution;
    map.evaluate(zs, vals, slopes);
    for (std::size_t i = 0; i < m; ++i) {
        if (dir * slopes[i] < min_slope) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "circle map lift slope " << slopes[i] << " at z = " << zs[i] << " is below " << min_slope
                << (min_slope > 1.0 ? " (not uniformly expanding)" : " (not a monotone covering)");
            throw PreconditionError(msg.str());
        }
    }

    std::vector<double> pre, pre_slope;
    if (auto conj = map.conjugacy()) {
        // y -> w = F^{-1}(y) -> base preimages u -> z = F(u); L'(z) = F'(w) B'(u) / F'(u).
        std::vector<Vec> ys(m);
        for (std::size_t i = 0; i < m; ++i) ys[i] = {zs[i], 0.0};
        FlowEvaluation back = conj->inverse(ys);
        std::vector<double> w(m), u, base_slope;
        for (std::size_t i = 0; i < m; ++i) w[i] = back.points[i][0];
        bisect_preimages(BaseMapLift(*conj->base), w, u, base_slope);
        std::vector<Vec> up(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) up[k] = {u[k], 0.0};
        FlowEvaluation fwd = conj->forward(up);
        pre.resize(u.size());
        pre_slope.resize(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) {
            pre[k] = fwd.points[k][0];
            pre_slope[k] = base_slope[k] / (back.jacobians[k / b][0][0] * fwd.jacobians[k][0][0]);
        }
    } else {
        bisect_preimages(map, zs, pre, pre_slope);
    }

    std::vector<Vec> preimages(pre.size());
    for (std::size_t k = 0; k < pre.size(); ++k) preimages[k] = {pre[k], 0.0};
    std::vector<double> eta_pre = interpolate(eta, preimages);
    std::vector<Vec> ys(m);
    for (std::size_t i = 0; i < m; ++i) ys[i] = {zs[i], 0.0};
    std::vector<double> eta_y = interpolate(eta, ys);

    double residual = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < b; ++j) sum += eta_pre[i * b + j] / std::abs(pre_slope[i * b + j]);
        residual = std::max(residual, std::abs(sum - eta_y[i]));
    }
    return residual;
}

}  // namespace conjresp
