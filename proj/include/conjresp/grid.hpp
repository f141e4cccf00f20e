#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace conjresp {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// A point (or tangent vector) on T^1 or T^2; unused trailing entries are zero.
using Vec = std::array<double, 2>;
/// Row-major 2x2 matrix; on T^1 only entry (0,0) is meaningful.
using Mat = std::array<std::array<double, 2>, 2>;

inline Mat identity_mat() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

inline Mat mat_mul(const Mat& a, const Mat& b) {
    Mat r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

inline Vec mat_vec(const Mat& a, const Vec& v) {
    return {a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]};
}

/// Determinant restricted to the leading dim x dim block.
inline double det(const Mat& a, int dim) {
    return dim == 1 ? a[0][0] : a[0][0] * a[1][1] - a[0][1] * a[1][0];
}

/// Reduce to [0, 1).
inline double wrap_unit(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

/// Representative of x mod 1 in [-1/2, 1/2).
inline double shortest_lift(double x) { return x - std::floor(x + 0.5); }

/// Uniform left-closed sampling of [0,1)^dim with even per-axis sizes >= 8.
class TorusGrid {
public:
    TorusGrid(int dim, std::array<int, 2> resolution);
    static TorusGrid line(int n) { return TorusGrid(1, {n, 1}); }
    static TorusGrid square(int n0, int n1) { return TorusGrid(2, {n0, n1}); }
    static TorusGrid square(int n) { return square(n, n); }

    int dim() const { return dim_; }
    int size(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
    std::size_t points() const {
        return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
    }
    /// Stored complex modes: the last axis keeps only k >= 0.
    std::size_t half_points() const {
        return dim_ == 1 ? static_cast<std::size_t>(n_[0] / 2 + 1)
                         : static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1] / 2 + 1);
    }
    int max_size() const { return dim_ == 1 ? n_[0] : std::max(n_[0], n_[1]); }

    /// Grid point for the flat row-major index (axis 0 slowest).
    Vec point(std::size_t index) const;
    std::vector<Vec> all_points() const;

    bool operator==(const TorusGrid& other) const = default;

private:
    int dim_;
    std::array<int, 2> n_;
};

}  // namespace conjresp
