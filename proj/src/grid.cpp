#include "conjresp/grid.hpp"

#include "conjresp/errors.hpp"

#include <string>

namespace conjresp {

TorusGrid::TorusGrid(int dim, std::array<int, 2> resolution) : dim_(dim), n_(resolution) {
    if (dim != 1 && dim != 2)
        throw InvalidArgument("grid dimension must be 1 or 2, got " + std::to_string(dim));
    if (dim == 1) n_[1] = 1;
    for (int a = 0; a < dim; ++a) {
        int n = n_[static_cast<std::size_t>(a)];
        if (n < 8 || n % 2 != 0)
            throw InvalidArgument("grid resolution must be even and >= 8 on axis " +
                                  std::to_string(a) + ", got " + std::to_string(n));
    }
}

Vec TorusGrid::point(std::size_t index) const {
    if (dim_ == 1) return {static_cast<double>(index) / n_[0], 0.0};
    std::size_t n1 = static_cast<std::size_t>(n_[1]);
    return {static_cast<double>(index / n1) / n_[0], static_cast<double>(index % n1) / n_[1]};
}

std::vector<Vec> TorusGrid::all_points() const {
    std::vector<Vec> out(points());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = point(i);
    return out;
}

}  // namespace conjresp
