#include "kerrdiv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kerrdiv {

namespace {

int checked_divisions(double length, double h, const char* what) {
    const double q = length / h;
    const double r = std::round(q);
    if (r < 1.0 || std::fabs(q - r) > 1e-9 * std::max(1.0, q))
        throw std::invalid_argument(std::string("build_mesh: step h does not divide the ") + what);
    return static_cast<int>(r);
}

} // namespace

SideMesh::SideMesh(const Rect& rect, double h) : rect_(rect), h_(h) {
    nx_ = checked_divisions(rect.width(), h, "rectangle width");
    ny_ = checked_divisions(rect.height(), h, "rectangle height");
    nodes_.reserve(static_cast<size_t>((nx_ + 1) * (ny_ + 1)));
    for (int iy = 0; iy <= ny_; ++iy)
        for (int ix = 0; ix <= nx_; ++ix)
            nodes_.emplace_back(rect.x0 + ix * h, rect.y0 + iy * h);
    tris_.reserve(static_cast<size_t>(2 * nx_ * ny_));
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            const int a = node_index(ix, iy);
            const int b = node_index(ix + 1, iy);
            const int c = node_index(ix + 1, iy + 1);
            const int d = node_index(ix, iy + 1);
            tris_.push_back({{a, b, c}});
            tris_.push_back({{a, c, d}});
        }
    }
}

int SideMesh::locate(const Eigen::Vector2d& x) const {
    int ix = static_cast<int>(std::floor((x[0] - rect_.x0) / h_));
    int iy = static_cast<int>(std::floor((x[1] - rect_.y0) / h_));
    ix = std::clamp(ix, 0, nx_ - 1);
    iy = std::clamp(iy, 0, ny_ - 1);
    const double lx = (x[0] - rect_.x0) - ix * h_;
    const double ly = (x[1] - rect_.y0) - iy * h_;
    const int cell = 2 * (iy * nx_ + ix);
    return lx >= ly ? cell : cell + 1;
}

void SideMesh::gradients(int t, std::array<Eigen::Vector2d, 3>& grad, double& area) const {
    const Triangle& tr = tris_[t];
    const Eigen::Vector2d& p0 = nodes_[tr.v[0]];
    const Eigen::Vector2d& p1 = nodes_[tr.v[1]];
    const Eigen::Vector2d& p2 = nodes_[tr.v[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    area = 0.5 * std::fabs(det);
    grad[0] = Eigen::Vector2d(p1[1] - p2[1], p2[0] - p1[0]) / det;
    grad[1] = Eigen::Vector2d(p2[1] - p0[1], p0[0] - p2[0]) / det;
    grad[2] = Eigen::Vector2d(p0[1] - p1[1], p1[0] - p0[0]) / det;
}

Eigen::Vector2d SideMesh::centroid(int t) const {
    const Triangle& tr = tris_[t];
    return (nodes_[tr.v[0]] + nodes_[tr.v[1]] + nodes_[tr.v[2]]) / 3.0;
}

std::array<Eigen::Vector2d, 3> SideMesh::edge_midpoints(int t) const {
    const Triangle& tr = tris_[t];
    const Eigen::Vector2d& p0 = nodes_[tr.v[0]];
    const Eigen::Vector2d& p1 = nodes_[tr.v[1]];
    const Eigen::Vector2d& p2 = nodes_[tr.v[2]];
    return {0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)};
}

TransmissionMesh TransmissionMesh::build(const Rect& bm, const Rect& bp, double h) {
    if (std::fabs(bm.x1) > 1e-12 || std::fabs(bp.x0) > 1e-12)
        throw std::invalid_argument("build_mesh: rectangles must meet at x1 = 0");
    if (std::fabs(bm.y0 - bp.y0) > 1e-12 || std::fabs(bm.y1 - bp.y1) > 1e-12)
        throw std::invalid_argument("build_mesh: rectangles must share the full interface segment");

    TransmissionMesh mesh;
    mesh.h_ = h;
    mesh.minus_ = SideMesh(bm, h);
    mesh.plus_ = SideMesh(bp, h);

    const int ny = mesh.minus_.ny();
    mesh.interface_minus_.reserve(ny + 1);
    mesh.interface_plus_.reserve(ny + 1);
    for (int iy = 0; iy <= ny; ++iy) {
        mesh.interface_minus_.push_back(mesh.minus_.node_index(mesh.minus_.nx(), iy));
        mesh.interface_plus_.push_back(mesh.plus_.node_index(0, iy));
    }
    for (int j = 0; j <= ny; ++j) {
        const Eigen::Vector2d a = mesh.minus_.node(mesh.interface_minus_[j]);
        const Eigen::Vector2d b = mesh.plus_.node(mesh.interface_plus_[j]);
        if ((a - b).norm() > 1e-12)
            throw std::logic_error("build_mesh: interface nodes out of correspondence");
    }

    mesh.iface_local_minus_.assign(mesh.minus_.n_nodes(), -1);
    mesh.iface_local_plus_.assign(mesh.plus_.n_nodes(), -1);
    for (int j = 0; j <= ny; ++j) {
        mesh.iface_local_minus_[mesh.interface_minus_[j]] = j;
        mesh.iface_local_plus_[mesh.interface_plus_[j]] = j;
    }
    return mesh;
}

int TransmissionMesh::interface_local(Side s, int node) const {
    return s == Side::Minus ? iface_local_minus_[node] : iface_local_plus_[node];
}

TransmissionMesh build_mesh(const Rect& bm, const Rect& bp, double h) {
    return TransmissionMesh::build(bm, bp, h);
}

} // namespace kerrdiv
