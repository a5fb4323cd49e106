#include "kerrdiv/assembly.hpp"

#include <cstdio>
#include <stdexcept>
#include <vector>

namespace kerrdiv {

Eigen::SparseMatrix<double> assemble_stiffness(const SideMesh& mesh, const ScalarField2D& coeff) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(9 * mesh.n_triangles()));
    std::array<Eigen::Vector2d, 3> grad;
    double area = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        mesh.gradients(t, grad, area);
        const double c = coeff(mesh.centroid(t));
        const Triangle& tr = mesh.tri(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(tr.v[i], tr.v[j], c * area * grad[i].dot(grad[j]));
    }
    Eigen::SparseMatrix<double> K(mesh.n_nodes(), mesh.n_nodes());
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();
    return K;
}

Eigen::SparseMatrix<double> assemble_stiffness(const TransmissionMesh& mesh, Side side,
                                               const ScalarField2D& coeff) {
    return assemble_stiffness(mesh.side(side), coeff);
}

Eigen::SparseMatrix<double> assemble_mass(const SideMesh& mesh) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(9 * mesh.n_triangles()));
    std::array<Eigen::Vector2d, 3> grad;
    double area = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        mesh.gradients(t, grad, area);
        const Triangle& tr = mesh.tri(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.emplace_back(tr.v[i], tr.v[j], area / 12.0 * (i == j ? 2.0 : 1.0));
    }
    Eigen::SparseMatrix<double> M(mesh.n_nodes(), mesh.n_nodes());
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    return M;
}

Eigen::SparseMatrix<double> assemble_interface_mass(const TransmissionMesh& mesh) {
    const int n = mesh.n_interface();
    const double h = mesh.h();
    std::vector<Eigen::Triplet<double>> trip;
    for (int e = 0; e + 1 < n; ++e) {
        trip.emplace_back(e, e, h / 3.0);
        trip.emplace_back(e + 1, e + 1, h / 3.0);
        trip.emplace_back(e, e + 1, h / 6.0);
        trip.emplace_back(e + 1, e, h / 6.0);
    }
    Eigen::SparseMatrix<double> M(n, n);
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    return M;
}

Eigen::VectorXd assemble_flux_load(const SideMesh& mesh, const VectorField2D& flux) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.n_nodes());
    std::array<Eigen::Vector2d, 3> grad;
    double area = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        mesh.gradients(t, grad, area);
        const auto qp = mesh.edge_midpoints(t);
        const Triangle& tr = mesh.tri(t);
        Eigen::Vector2d avg = Eigen::Vector2d::Zero();
        for (const auto& x : qp) avg += flux(x);
        avg *= area / 3.0;
        for (int i = 0; i < 3; ++i) load[tr.v[i]] -= avg.dot(grad[i]);
    }
    return load;
}

Eigen::VectorXd assemble_flux_load(const TransmissionMesh& mesh, Side side,
                                   const VectorField2D& flux) {
    return assemble_flux_load(mesh.side(side), flux);
}

Eigen::VectorXd assemble_scalar_load(const SideMesh& mesh, const ScalarField2D& f) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        std::array<Eigen::Vector2d, 3> grad;
        double area = 0.0;
        mesh.gradients(t, grad, area);
        const auto qp = mesh.edge_midpoints(t);
        const Triangle& tr = mesh.tri(t);
        // Each P1 shape function has value 1/2 on two edge midpoints, 0 on the third.
        const double f0 = f(qp[0]), f1 = f(qp[1]), f2 = f(qp[2]);
        load[tr.v[0]] += area / 3.0 * 0.5 * (f0 + f2);
        load[tr.v[1]] += area / 3.0 * 0.5 * (f0 + f1);
        load[tr.v[2]] += area / 3.0 * 0.5 * (f1 + f2);
    }
    return load;
}

Eigen::VectorXd node_areas(const SideMesh& mesh) {
    Eigen::VectorXd areas = Eigen::VectorXd::Zero(mesh.n_nodes());
    std::array<Eigen::Vector2d, 3> grad;
    double area = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        mesh.gradients(t, grad, area);
        const Triangle& tr = mesh.tri(t);
        for (int i = 0; i < 3; ++i) areas[tr.v[i]] += area / 3.0;
    }
    return areas;
}

FemField FemField::zero(const TransmissionMesh& mesh) {
    FemField f;
    f.mesh = &mesh;
    f.minus = Eigen::VectorXd::Zero(mesh.side(Side::Minus).n_nodes());
    f.plus = Eigen::VectorXd::Zero(mesh.side(Side::Plus).n_nodes());
    return f;
}

Eigen::Vector2d FemField::gradient(Side s, int tri) const {
    const SideMesh& sm = mesh->side(s);
    std::array<Eigen::Vector2d, 3> grad;
    double area = 0.0;
    sm.gradients(tri, grad, area);
    const Triangle& tr = sm.tri(tri);
    const Eigen::VectorXd& c = coeffs(s);
    return c[tr.v[0]] * grad[0] + c[tr.v[1]] * grad[1] + c[tr.v[2]] * grad[2];
}

double FemField::value(Side s, int tri, const Eigen::Vector2d& x) const {
    const SideMesh& sm = mesh->side(s);
    const Triangle& tr = sm.tri(tri);
    const Eigen::Vector2d& p0 = sm.node(tr.v[0]);
    const Eigen::Vector2d& p1 = sm.node(tr.v[1]);
    const Eigen::Vector2d& p2 = sm.node(tr.v[2]);
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double l1 = ((x[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (x[1] - p0[1])) / det;
    const double l2 = ((p1[0] - p0[0]) * (x[1] - p0[1]) - (x[0] - p0[0]) * (p1[1] - p0[1])) / det;
    const Eigen::VectorXd& c = coeffs(s);
    return (1.0 - l1 - l2) * c[tr.v[0]] + l1 * c[tr.v[1]] + l2 * c[tr.v[2]];
}

void dump_triplets(const Eigen::SparseMatrix<double>& A, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("dump_triplets: cannot open " + path);
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
            std::fprintf(f, "%d %d %.17g\n", static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value());
    std::fclose(f);
}

} // namespace kerrdiv
