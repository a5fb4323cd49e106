#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace kerrdiv {

/// Square or rectangular sparse system; equality-constraint rows, when
/// present, are appended at the bottom of the matrix.
struct SparseSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd rhs;
    int n_constraints = 0;
    bool symmetric = false;
};

class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

/// Minimum-residual solution of the system. Square nonsingular systems are
/// solved exactly (sparse LU plus one refinement step); rectangular systems
/// go through the stabilized augmented least-squares form
///   [gamma I, A; A^T, 0] [s; x] = [b; 0]
/// with iterative refinement of the least-squares residual.
Eigen::VectorXd solve_constrained(const SparseSystem& system);

} // namespace kerrdiv
