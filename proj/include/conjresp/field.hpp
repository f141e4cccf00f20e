#pragma once

#include "conjresp/grid.hpp"

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace conjresp {

using Complex = std::complex<double>;

/// Real periodic function sampled on a TorusGrid. Values are immutable after
/// construction; every operation returns a new field.
class ScalarField {
public:
    ScalarField(TorusGrid grid, std::vector<double> values);

    static ScalarField constant(const TorusGrid& grid, double value);
    static ScalarField zero(const TorusGrid& grid) { return constant(grid, 0.0); }
    static ScalarField sample(const TorusGrid& grid, const std::function<double(const Vec&)>& f);

    const TorusGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

/// Discrete Fourier coefficients c_k = (1/N) sum_j f_j e^{-2 pi i k.x_j}, stored
/// for the non-negative half of the last axis (conjugate symmetry supplies the
/// rest). Layout is row-major over (axis-0 index, last-axis k >= 0).
class Spectrum {
public:
    Spectrum(TorusGrid grid, std::vector<Complex> coeffs);

    const TorusGrid& grid() const { return grid_; }
    std::span<const Complex> data() const { return coeffs_; }
    std::span<Complex> data() { return coeffs_; }

    /// Signed wave vector of stored entry `index`. Axis-0 indices above N/2
    /// map to k - N; the axis-0 Nyquist index maps to +N/2.
    std::array<int, 2> wave_vector(std::size_t index) const;
    /// Coefficient for any wave vector with |k_i| <= N_i/2.
    Complex at(std::array<int, 2> k) const;

private:
    TorusGrid grid_;
    std::vector<Complex> coeffs_;
};

Spectrum to_spectral(const ScalarField& field);
ScalarField from_spectral(const Spectrum& spectrum);

/// Spectral derivative along `axis`; the Nyquist mode of that axis is zeroed.
ScalarField derivative(const ScalarField& field, int axis);

double mean(const ScalarField& field);
double max_abs(const ScalarField& field);
double min_value(const ScalarField& field);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);
ScalarField operator*(double s, const ScalarField& a);
ScalarField add_constant(const ScalarField& a, double c);

ScalarField product(const ScalarField& a, const ScalarField& b);
/// Pointwise a/b; throws DomainError when min(b) <= 0.
ScalarField quotient(const ScalarField& a, const ScalarField& b);
/// Product computed on a zero-padded grid (3/2 rule) and truncated back, so
/// the result carries no aliasing from modes below the input Nyquist.
ScalarField padded_product(const ScalarField& a, const ScalarField& b);

/// One real Fourier term Re(c e^{2 pi i k.x}).
struct Mode {
    std::array<int, 2> k{0, 0};
    Complex c{0.0, 0.0};
};

/// Sum of Re(c e^{2 pi i k.x}) over the given modes, sampled on `grid`.
ScalarField from_modes(const TorusGrid& grid, std::span<const Mode> modes);

/// Positive density eta of a volume form omega = eta * Lebesgue, with mean 1.
class VolumeDensity {
public:
    explicit VolumeDensity(ScalarField eta);
    static VolumeDensity lebesgue(const TorusGrid& grid);
    /// Rescales a positive field to unit mass.
    static VolumeDensity normalized(const ScalarField& positive);

    const ScalarField& eta() const { return eta_; }
    const TorusGrid& grid() const { return eta_.grid(); }

private:
    ScalarField eta_;
};

/// R^n-valued periodic field; also represents sections over a map on the
/// flat torus, where all tangent spaces are identified.
class VectorField {
public:
    explicit VectorField(std::vector<ScalarField> components);
    static VectorField zero(const TorusGrid& grid);

    const TorusGrid& grid() const { return components_.front().grid(); }
    int dim() const { return grid().dim(); }
    const ScalarField& operator[](int axis) const { return components_[static_cast<std::size_t>(axis)]; }
    const std::vector<ScalarField>& components() const { return components_; }

    /// Euclidean length at grid point i.
    double norm_at(std::size_t i) const;
    double max_norm() const;

private:
    std::vector<ScalarField> components_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);

/// An (n-1)-form: a function f on T^1, or a dx + b dy on T^2 (components a, b).
class CoVectorForm {
public:
    explicit CoVectorForm(std::vector<ScalarField> components);
    static CoVectorForm zero(const TorusGrid& grid);

    const TorusGrid& grid() const { return components_.front().grid(); }
    int dim() const { return grid().dim(); }
    const ScalarField& operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }
    const std::vector<ScalarField>& components() const { return components_; }

private:
    std::vector<ScalarField> components_;
};

/// Density of d(theta) with respect to the volume element: f' on T^1,
/// b_x - a_y on T^2.
ScalarField exterior_derivative(const CoVectorForm& theta);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);

}  // namespace conjresp
