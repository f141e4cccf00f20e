#pragma once

#include "conjresp/field.hpp"

#include <span>
#include <vector>

namespace conjresp {

/// Trigonometric interpolant of a sampled field, evaluable anywhere on the
/// torus together with its exact gradient. Modes whose magnitude falls below
/// `relative_cutoff * max|c_k|` are dropped, which makes band-limited fields
/// cheap to evaluate; collocation at grid points is preserved to round-off.
class Interpolant {
public:
    explicit Interpolant(const ScalarField& field, double relative_cutoff = 1e-15);

    int dim() const { return dim_; }
    std::size_t mode_count() const { return terms_.size(); }

    double value(const Vec& x) const;
    double value_and_gradient(const Vec& x, Vec& grad) const;

private:
    struct Term {
        int k0;
        int k1;
        double re;  // weight already folded in
        double im;
    };
    int dim_;
    int kmax0_ = 0;
    int kmax1_ = 0;
    std::vector<Term> terms_;
};

/// Component-wise interpolant of a vector field with its Jacobian.
class VectorInterpolant {
public:
    explicit VectorInterpolant(const VectorField& field, double relative_cutoff = 1e-15);

    int dim() const { return static_cast<int>(components_.size()); }
    Vec value(const Vec& x) const;
    /// Value and Jacobian d[i][j] = d X^i / d x_j.
    void evaluate(const Vec& x, Vec& v, Mat& d) const;

private:
    std::vector<Interpolant> components_;
};

/// Spectral interpolation of `field` at arbitrary points (reduced mod 1).
std::vector<double> interpolate(const ScalarField& field, std::span<const Vec> points);

}  // namespace conjresp
