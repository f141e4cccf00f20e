#include "conjresp/field.hpp"

#include "conjresp/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <sstream>

namespace conjresp {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// FFTW_UNALIGNED keeps the chosen codelets independent of buffer alignment,
// so repeated runs are bit-identical.
constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* op) {
    if (!(a == b)) throw InvalidArgument(std::string(op) + ": fields live on different grids");
}

int signed_index(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

ScalarField::ScalarField(TorusGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.points())
        throw InvalidArgument("field has " + std::to_string(values_.size()) +
                              " values, grid has " + std::to_string(grid_.points()) + " points");
}

ScalarField ScalarField::constant(const TorusGrid& grid, double value) {
    return ScalarField(grid, std::vector<double>(grid.points(), value));
}

ScalarField ScalarField::sample(const TorusGrid& grid, const std::function<double(const Vec&)>& f) {
    std::vector<double> v(grid.points());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.point(i));
    return ScalarField(grid, std::move(v));
}

Spectrum::Spectrum(TorusGrid grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.half_points())
        throw InvalidArgument("spectrum size does not match grid");
}

std::array<int, 2> Spectrum::wave_vector(std::size_t index) const {
    if (grid_.dim() == 1) return {static_cast<int>(index), 0};
    std::size_t h = static_cast<std::size_t>(grid_.size(1) / 2 + 1);
    int i0 = static_cast<int>(index / h);
    int i1 = static_cast<int>(index % h);
    return {signed_index(i0, grid_.size(0)), i1};
}

Complex Spectrum::at(std::array<int, 2> k) const {
    if (grid_.dim() == 1) {
        return k[0] >= 0 ? coeffs_[static_cast<std::size_t>(k[0])]
                         : std::conj(coeffs_[static_cast<std::size_t>(-k[0])]);
    }
    if (k[1] < 0) return std::conj(at({-k[0], -k[1]}));
    int n0 = grid_.size(0);
    int i0 = ((k[0] % n0) + n0) % n0;
    std::size_t h = static_cast<std::size_t>(grid_.size(1) / 2 + 1);
    return coeffs_[static_cast<std::size_t>(i0) * h + static_cast<std::size_t>(k[1])];
}

Spectrum to_spectral(const ScalarField& field) {
    const TorusGrid& g = field.grid();
    std::vector<double> in(field.values().begin(), field.values().end());
    std::vector<Complex> out(g.half_points());
    auto* cout = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = g.dim() == 1 ? fftw_plan_dft_r2c_1d(g.size(0), in.data(), cout, kPlanFlags)
                            : fftw_plan_dft_r2c_2d(g.size(0), g.size(1), in.data(), cout, kPlanFlags);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / static_cast<double>(g.points());
    for (auto& c : out) c *= scale;
    return Spectrum(g, std::move(out));
}

ScalarField from_spectral(const Spectrum& spectrum) {
    const TorusGrid& g = spectrum.grid();
    std::vector<Complex> in(spectrum.data().begin(), spectrum.data().end());
    std::vector<double> out(g.points());
    auto* cin = reinterpret_cast<fftw_complex*>(in.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = g.dim() == 1 ? fftw_plan_dft_c2r_1d(g.size(0), cin, out.data(), kPlanFlags)
                            : fftw_plan_dft_c2r_2d(g.size(0), g.size(1), cin, out.data(), kPlanFlags);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return ScalarField(g, std::move(out));
}

ScalarField derivative(const ScalarField& field, int axis) {
    const TorusGrid& g = field.grid();
    if (axis < 0 || axis >= g.dim())
        throw InvalidArgument("derivative axis " + std::to_string(axis) + " out of range for dim " +
                              std::to_string(g.dim()));
    Spectrum s = to_spectral(field);
    const int nyquist = g.size(axis) / 2;
    auto data = s.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        int k = s.wave_vector(i)[static_cast<std::size_t>(axis)];
        if (k == nyquist || k == -nyquist)
            data[i] = 0.0;
        else
            data[i] *= Complex(0.0, kTwoPi * k);
    }
    return from_spectral(s);
}

double mean(const ScalarField& field) {
    double sum = 0.0;
    for (double v : field.values()) sum += v;
    return sum / static_cast<double>(field.size());
}

double max_abs(const ScalarField& field) {
    double m = 0.0;
    for (double v : field.values()) m = std::max(m, std::abs(v));
    return m;
}

double min_value(const ScalarField& field) {
    return *std::min_element(field.values().begin(), field.values().end());
}

namespace {

template <class Op>
ScalarField zip(const ScalarField& a, const ScalarField& b, const char* name, Op op) {
    require_same_grid(a.grid(), b.grid(), name);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
    return ScalarField(a.grid(), std::move(out));
}

template <class Op>
ScalarField map_values(const ScalarField& a, Op op) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i]);
    return ScalarField(a.grid(), std::move(out));
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return zip(a, b, "add", [](double x, double y) { return x + y; });
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return zip(a, b, "subtract", [](double x, double y) { return x - y; });
}
ScalarField operator-(const ScalarField& a) {
    return map_values(a, [](double x) { return -x; });
}
ScalarField operator*(double s, const ScalarField& a) {
    return map_values(a, [s](double x) { return s * x; });
}
ScalarField add_constant(const ScalarField& a, double c) {
    return map_values(a, [c](double x) { return x + c; });
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
    return zip(a, b, "product", [](double x, double y) { return x * y; });
}

ScalarField quotient(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "quotient");
    auto it = std::min_element(b.values().begin(), b.values().end());
    if (*it <= 0.0) {
        auto loc = static_cast<std::size_t>(it - b.values().begin());
        Vec p = b.grid().point(loc);
        std::ostringstream msg;
        msg.precision(17);
        msg << "quotient: denominator must be strictly positive, minimum " << *it << " at grid index "
            << loc << " (x = " << p[0];
        if (b.grid().dim() == 2) msg << ", y = " << p[1];
        msg << ")";
        throw DomainError(msg.str(), *it, loc);
    }
    return zip(a, b, "quotient", [](double x, double y) { return x / y; });
}

namespace {

int padded_size(int n) {
    int m = (3 * n + 1) / 2;
    return m % 2 == 0 ? m : m + 1;
}

// Copies every mode with |k_i| < N_i/2 from `src` into a zero spectrum on `dst`.
Spectrum resample_modes(const Spectrum& src, const TorusGrid& dst) {
    const TorusGrid& sg = src.grid();
    std::vector<Complex> out(dst.half_points(), Complex(0.0));
    Spectrum result(dst, std::move(out));
    auto data = result.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto k = result.wave_vector(i);
        bool inside = true;
        for (int a = 0; a < sg.dim(); ++a) {
            int lim = std::min(sg.size(a), dst.size(a)) / 2;
            if (std::abs(k[static_cast<std::size_t>(a)]) >= lim) inside = false;
        }
        if (inside) data[i] = src.at(k);
    }
    return result;
}

}  // namespace

ScalarField padded_product(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "padded_product");
    const TorusGrid& g = a.grid();
    TorusGrid big = g.dim() == 1 ? TorusGrid::line(padded_size(g.size(0)))
                                 : TorusGrid::square(padded_size(g.size(0)), padded_size(g.size(1)));
    ScalarField fa = from_spectral(resample_modes(to_spectral(a), big));
    ScalarField fb = from_spectral(resample_modes(to_spectral(b), big));
    return from_spectral(resample_modes(to_spectral(product(fa, fb)), g));
}

ScalarField from_modes(const TorusGrid& grid, std::span<const Mode> modes) {
    std::vector<double> v(grid.points(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        Vec x = grid.point(i);
        double sum = 0.0;
        for (const Mode& m : modes) {
            double phase = kTwoPi * (m.k[0] * x[0] + m.k[1] * x[1]);
            sum += m.c.real() * std::cos(phase) - m.c.imag() * std::sin(phase);
        }
        v[i] = sum;
    }
    return ScalarField(grid, std::move(v));
}

VolumeDensity::VolumeDensity(ScalarField eta) : eta_(std::move(eta)) {
    auto it = std::min_element(eta_.values().begin(), eta_.values().end());
    if (*it <= 0.0) {
        auto loc = static_cast<std::size_t>(it - eta_.values().begin());
        throw DomainError("density must be strictly positive, minimum " + std::to_string(*it) +
                              " at grid index " + std::to_string(loc),
                          *it, loc);
    }
    double m = mean(eta_);
    if (std::abs(m - 1.0) > 1e-10)
        throw NormalizationError("density must have unit mass, mean is " + std::to_string(m), m);
}

VolumeDensity VolumeDensity::lebesgue(const TorusGrid& grid) {
    return VolumeDensity(ScalarField::constant(grid, 1.0));
}

VolumeDensity VolumeDensity::normalized(const ScalarField& positive) {
    double m = mean(positive);
    if (!(m > 0.0)) throw DomainError("density to normalize has non-positive mass", m, 0);
    return VolumeDensity((1.0 / m) * positive);
}

VectorField::VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {
    if (components_.empty()) throw InvalidArgument("vector field needs components");
    const TorusGrid& g = components_.front().grid();
    if (static_cast<int>(components_.size()) != g.dim())
        throw InvalidArgument("vector field component count must equal grid dimension");
    for (const auto& c : components_) require_same_grid(g, c.grid(), "vector field");
}

VectorField VectorField::zero(const TorusGrid& grid) {
    return VectorField(std::vector<ScalarField>(static_cast<std::size_t>(grid.dim()), ScalarField::zero(grid)));
}

double VectorField::norm_at(std::size_t i) const {
    double s = 0.0;
    for (const auto& c : components_) s += c[i] * c[i];
    return std::sqrt(s);
}

double VectorField::max_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid().points(); ++i) m = std::max(m, norm_at(i));
    return m;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    std::vector<ScalarField> c;
    for (int i = 0; i < a.dim(); ++i) c.push_back(a[i] + b[i]);
    return VectorField(std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    std::vector<ScalarField> c;
    for (int i = 0; i < a.dim(); ++i) c.push_back(a[i] - b[i]);
    return VectorField(std::move(c));
}

CoVectorForm::CoVectorForm(std::vector<ScalarField> components) : components_(std::move(components)) {
    if (components_.empty()) throw InvalidArgument("form needs components");
    const TorusGrid& g = components_.front().grid();
    std::size_t expected = g.dim() == 1 ? 1 : 2;
    if (components_.size() != expected)
        throw InvalidArgument("an (n-1)-form on T^" + std::to_string(g.dim()) + " has " +
                              std::to_string(expected) + " component(s)");
    for (const auto& c : components_) require_same_grid(g, c.grid(), "form");
}

CoVectorForm CoVectorForm::zero(const TorusGrid& grid) {
    return CoVectorForm(std::vector<ScalarField>(grid.dim() == 1 ? 1u : 2u, ScalarField::zero(grid)));
}

ScalarField exterior_derivative(const CoVectorForm& theta) {
    if (theta.dim() == 1) return derivative(theta[0], 0);
    return derivative(theta[1], 0) - derivative(theta[0], 1);
}

VectorField gradient(const ScalarField& f) {
    std::vector<ScalarField> c;
    for (int a = 0; a < f.grid().dim(); ++a) c.push_back(derivative(f, a));
    return VectorField(std::move(c));
}

ScalarField divergence(const VectorField& v) {
    ScalarField sum = derivative(v[0], 0);
    for (int a = 1; a < v.dim(); ++a) sum = sum + derivative(v[a], a);
    return sum;
}

}  // namespace conjresp
