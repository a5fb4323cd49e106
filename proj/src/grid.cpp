#include "kerrdiv/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kerrdiv {

Grid1D Grid1D::make(double left, double right, double h) {
    if (!(left < 0.0) || !(right > 0.0))
        throw std::invalid_argument("Grid1D: need left < 0 < right");
    if (!(h > 0.0))
        throw std::invalid_argument("Grid1D: spacing must be positive");
    const double nl = -left / h;
    const double nr = right / h;
    const double rl = std::round(nl), rr = std::round(nr);
    if (std::fabs(nl - rl) > 1e-9 * std::max(1.0, nl) ||
        std::fabs(nr - rr) > 1e-9 * std::max(1.0, nr))
        throw std::invalid_argument(
            "Grid1D: spacing h=" + std::to_string(h) +
            " does not place x=0 on the grid for [" + std::to_string(left) +
            ", " + std::to_string(right) + "]");
    Grid1D g;
    g.left_ = left;
    g.right_ = right;
    g.h_ = h;
    g.interface_index_ = static_cast<int>(rl);
    g.n_points_ = static_cast<int>(rl + rr) + 1;
    return g;
}

std::vector<double> Grid1D::points() const {
    std::vector<double> xs(n_points_);
    for (int i = 0; i < n_points_; ++i) xs[i] = point(i);
    return xs;
}

} // namespace kerrdiv
