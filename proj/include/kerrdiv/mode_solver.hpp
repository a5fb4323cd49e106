#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kerrdiv/dielectric.hpp"
#include "kerrdiv/grid.hpp"

namespace kerrdiv {

/// Discretization of the second-order interface eigenvalue problem
///
///   (-d^2/dx^2 + (eps1'/eps1) d/dx - eps1 w^2) ((I + L) v) = -k^2 (I + L) v
///
/// for the C^1 part v of the out-of-plane magnetic component. The splitting
/// operator L acts through the one-sided derivative v'(0) and is a rank-one
/// correction with kernel -sign(nu) * exp(-|nu| x) for x >= 0 and the
/// constant -sign(nu) for x < 0, nu = (eps1+(0) - eps1-(0)) / eps1-(0).
///
/// Matrix form: A = T0 + a d^T and B = -(diag(mask) + g d^T), where d is the
/// second-order one-sided derivative functional at the interface. The first
/// and last rows hold the truncation conditions v(-L) = sign(nu) v'(0) and
/// v(+L) = 0 (zero rows in B).
struct EigenPair {
    Eigen::SparseMatrix<double> T0;
    Eigen::VectorXd a;       // rank-one row coefficients in A
    Eigen::VectorXd g;       // rank-one row coefficients in B (kernel samples)
    Eigen::VectorXd mask;    // 1 on interior rows, 0 on boundary rows
    Eigen::VectorXd g_full;  // kernel samples on all rows, for w3 recovery
    std::array<int, 3> d_index{};
    std::array<double, 3> d_weight{};
    int interface_index = 0;
    double nu = 0.0;

    double d_dot(const Eigen::VectorXd& v) const {
        return d_weight[0] * v[d_index[0]] + d_weight[1] * v[d_index[1]] +
               d_weight[2] * v[d_index[2]];
    }
    Eigen::VectorXd apply_A(const Eigen::VectorXd& v) const;
    Eigen::VectorXd apply_B(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd dense_A() const;
    Eigen::MatrixXd dense_B() const;

    /// Recovers the physical w3 samples from an eigenvector of (A, B).
    Eigen::VectorXd w3_from_eigenvector(const Eigen::VectorXd& v) const;
};

EigenPair assemble_eigenproblem(const DielectricProfile& profile, double omega0,
                                const Grid1D& grid);

struct ModeCandidate {
    double k0 = 0.0;
    Eigen::VectorXd w3;
    Eigen::VectorXd eigenvector;  // raw generalized-eigenproblem vector
    double boundary_ratio = 0.0;
    double eig_residual = 0.0;
};

struct DispersionOptions {
    enum class Method { Auto, Dense, ShiftInvert };
    Method method = Method::Auto;
    double shift = 0.0;           // 0 = default 1.2 * eps1-(0) * omega^2
    double decay_tol = 1e-6;      // boundary amplitude ratio acceptance
    int krylov_dim = 60;
    double residual_tol = 1e-8;   // ||A v - k^2 B v|| / ||v||
};

/// Solves the generalized eigenproblem and returns localized candidates
/// sorted by boundary ratio (ascending), then k^2 (descending). An empty
/// list is a valid outcome (no localized mode).
std::vector<ModeCandidate> solve_dispersion(const DielectricProfile& profile,
                                            double omega0, const Grid1D& grid,
                                            int n_candidates = 4,
                                            const DispersionOptions& options = {});

/// TM interface mode on a 1D grid. w1 and w3 are real, w2 = i * w2_imag.
/// Normalized so that max|w3| = 1 and w3(0) > 0.
struct InterfaceMode {
    Grid1D grid;
    double omega0 = 0.0;
    double k0 = 0.0;
    double nu = 0.0;
    Eigen::VectorXd w1;
    Eigen::VectorXd w2_imag;
    Eigen::VectorXd w3;
    // Minus-side limits at the interface; the grid sample there carries the
    // plus-side values.
    double w1_left0 = 0.0;
    double w2_imag_left0 = 0.0;
};

/// Builds the remaining components from w3 via w1 = -k/(omega eps1) w3 and
/// w2 = -i/(omega eps1) w3' (one-sided differences at the interface).
InterfaceMode reconstruct_mode(const Eigen::VectorXd& w3, const DielectricProfile& profile,
                               double omega0, double k0, const Grid1D& grid);

struct ModeReport {
    double jump_eps1w1 = 0.0;
    double jump_w2 = 0.0;
    double jump_w3 = 0.0;
    double left_decay_rate = 0.0;
    double right_decay_tail = 0.0;
    double residual_L = 0.0;
    double div_identity_residual = 0.0;
    double max_eps1w1 = 0.0;
    double max_w2 = 0.0;
    double max_w3 = 0.0;
};

/// Interface-condition and decay diagnostics. Jumps are formed by linear
/// one-sided extrapolation to x1 = 0 from the two nearest samples on each
/// side; the decay rate is a log-linear fit on the left (constant) side.
ModeReport verify_mode(const InterfaceMode& mode, const DielectricProfile& profile);

/// Reconstructs a mode with a perturbed wavenumber; used to probe the
/// sensitivity of the operator residual.
double mode_residual_at_k(const InterfaceMode& mode, const DielectricProfile& profile,
                          double k);

} // namespace kerrdiv
