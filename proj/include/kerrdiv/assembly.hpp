#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kerrdiv/mesh.hpp"

namespace kerrdiv {

using ScalarField2D = std::function<double(const Eigen::Vector2d&)>;
using VectorField2D = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Stiffness block: (j,k) = sum_T coeff(centroid_T) int_T grad(eta_j).grad(eta_k).
/// P1 gradients are exact; the coefficient uses one-point quadrature.
Eigen::SparseMatrix<double> assemble_stiffness(const SideMesh& mesh, const ScalarField2D& coeff);
Eigen::SparseMatrix<double> assemble_stiffness(const TransmissionMesh& mesh, Side side,
                                               const ScalarField2D& coeff);

/// Consistent P1 mass matrix.
Eigen::SparseMatrix<double> assemble_mass(const SideMesh& mesh);

/// 1D P1 mass matrix of the shared-edge hat functions on the interface,
/// indexed by interface-local node numbers.
Eigen::SparseMatrix<double> assemble_interface_mass(const TransmissionMesh& mesh);

/// Load with entries -int_Omega flux . grad(eta_j), by the 3-point
/// edge-midpoint rule (exact for quadratic integrands).
Eigen::VectorXd assemble_flux_load(const SideMesh& mesh, const VectorField2D& flux);
Eigen::VectorXd assemble_flux_load(const TransmissionMesh& mesh, Side side,
                                   const VectorField2D& flux);

/// Load with entries int_Omega f eta_j, same quadrature.
Eigen::VectorXd assemble_scalar_load(const SideMesh& mesh, const ScalarField2D& f);

/// int_Omega eta_j per node.
Eigen::VectorXd node_areas(const SideMesh& mesh);

/// Nodal coefficients per side; evaluation inside a triangle is the
/// barycentric-linear combination of its three nodal values.
struct FemField {
    const TransmissionMesh* mesh = nullptr;
    Eigen::VectorXd minus, plus;

    const Eigen::VectorXd& coeffs(Side s) const { return s == Side::Minus ? minus : plus; }
    Eigen::VectorXd& coeffs(Side s) { return s == Side::Minus ? minus : plus; }

    static FemField zero(const TransmissionMesh& mesh);
    Eigen::Vector2d gradient(Side s, int tri) const;
    double value(Side s, int tri, const Eigen::Vector2d& x) const;
};

/// Plain-text triplet dump (row col value per line), for debugging.
void dump_triplets(const Eigen::SparseMatrix<double>& A, const std::string& path);

} // namespace kerrdiv
