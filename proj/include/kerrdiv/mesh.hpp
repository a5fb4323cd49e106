#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "kerrdiv/side.hpp"

namespace kerrdiv {

struct Rect {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

struct Triangle {
    std::array<int, 3> v{};
};

/// Structured triangulation of an axis-aligned rectangle: each h-by-h cell
/// is split along the (x0,y0)-(x1,y1) diagonal into two right triangles.
class SideMesh {
public:
    SideMesh() = default;
    SideMesh(const Rect& rect, double h);

    const Rect& rect() const { return rect_; }
    double h() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int n_nodes() const { return static_cast<int>(nodes_.size()); }
    int n_triangles() const { return static_cast<int>(tris_.size()); }
    const Eigen::Vector2d& node(int i) const { return nodes_[i]; }
    const Triangle& tri(int t) const { return tris_[t]; }
    const std::vector<Triangle>& triangles() const { return tris_; }

    int node_index(int ix, int iy) const { return iy * (nx_ + 1) + ix; }

    /// Triangle containing the point (boundary ties go to the lower triangle).
    int locate(const Eigen::Vector2d& x) const;

    /// P1 shape gradients and the triangle area.
    void gradients(int t, std::array<Eigen::Vector2d, 3>& grad, double& area) const;

    Eigen::Vector2d centroid(int t) const;
    std::array<Eigen::Vector2d, 3> edge_midpoints(int t) const;

private:
    Rect rect_;
    double h_ = 0;
    int nx_ = 0, ny_ = 0;
    std::vector<Eigen::Vector2d> nodes_;
    std::vector<Triangle> tris_;
};

/// Conforming pair of side meshes sharing the interface segment on x1 = 0.
/// Interface nodes are duplicated, one per side, in 1-1 geometric
/// correspondence and sorted by x2.
class TransmissionMesh {
public:
    static TransmissionMesh build(const Rect& bounds_minus, const Rect& bounds_plus, double h);

    const SideMesh& side(Side s) const { return s == Side::Minus ? minus_ : plus_; }
    double h() const { return h_; }
    int n_interface() const { return static_cast<int>(interface_minus_.size()); }
    const std::vector<int>& interface_nodes(Side s) const {
        return s == Side::Minus ? interface_minus_ : interface_plus_;
    }
    /// Interface-local index of a node, or -1.
    int interface_local(Side s, int node) const;

private:
    SideMesh minus_, plus_;
    double h_ = 0;
    std::vector<int> interface_minus_, interface_plus_;
    std::vector<int> iface_local_minus_, iface_local_plus_;
};

TransmissionMesh build_mesh(const Rect& bounds_minus, const Rect& bounds_plus, double h);

} // namespace kerrdiv
