#pragma once

#include <vector>

namespace kerrdiv {

/// Uniform 1D grid on [left, right] with x = 0 as a grid point.
class Grid1D {
public:
    Grid1D() = default;  // empty placeholder; use make()

    /// Builds a grid with the given spacing. Throws std::invalid_argument
    /// if h does not divide both |left| and right (interface alignment).
    static Grid1D make(double left, double right, double h);

    double left() const { return left_; }
    double right() const { return right_; }
    int n_points() const { return n_points_; }
    double spacing() const { return h_; }
    int interface_index() const { return interface_index_; }

    double point(int i) const { return left_ + h_ * i; }
    std::vector<double> points() const;

private:
    double left_ = 0, right_ = 0, h_ = 0;
    int n_points_ = 0;
    int interface_index_ = 0;
};

} // namespace kerrdiv
