#include "kerrdiv/linear_solver.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseLU>

namespace kerrdiv {

namespace {

Eigen::VectorXd solve_square(const SparseSystem& sys) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.A);
    if (lu.info() != Eigen::Success)
        throw SingularSystemError("solve_constrained: LU factorization failed (rank deficiency "
                                  "beyond the expected constant modes?) on a " +
                                  std::to_string(sys.A.rows()) + "x" +
                                  std::to_string(sys.A.cols()) + " system");
    Eigen::VectorXd x = lu.solve(sys.rhs);
    x += lu.solve(Eigen::VectorXd(sys.rhs - sys.A * x));
    if (!x.allFinite())
        throw SingularSystemError("solve_constrained: non-finite solution");
    return x;
}

Eigen::VectorXd solve_least_squares(const SparseSystem& sys) {
    const int m = static_cast<int>(sys.A.rows());
    const int n = static_cast<int>(sys.A.cols());

    double gamma = 0.0;
    for (int k = 0; k < sys.A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it)
            gamma = std::max(gamma, std::fabs(it.value()));
    if (gamma == 0.0)
        throw SingularSystemError("solve_constrained: zero matrix");

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(2 * sys.A.nonZeros() + m));
    for (int i = 0; i < m; ++i) trip.emplace_back(i, n + i, gamma);
    for (int k = 0; k < sys.A.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            trip.emplace_back(r, c, it.value());
            trip.emplace_back(m + c, n + r, it.value());
        }
    }
    Eigen::SparseMatrix<double> aug(m + n, m + n);
    aug.setFromTriplets(trip.begin(), trip.end());
    aug.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(aug);
    if (lu.info() != Eigen::Success)
        throw SingularSystemError("solve_constrained: augmented least-squares factorization "
                                  "failed (column rank deficiency?)");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    // Refinement passes on the least-squares residual. The augmented solution
    // is laid out as [x; residual / gamma].
    for (int pass = 0; pass < 3; ++pass) {
        Eigen::VectorXd rhs(m + n);
        rhs.head(m) = sys.rhs - sys.A * x;
        rhs.tail(n).setZero();
        const Eigen::VectorXd sol = lu.solve(rhs);
        x += sol.head(n);
        if (!x.allFinite())
            throw SingularSystemError("solve_constrained: non-finite least-squares solution");
    }
    return x;
}

} // namespace

Eigen::VectorXd solve_constrained(const SparseSystem& sys) {
    if (sys.A.rows() != sys.rhs.size())
        throw std::invalid_argument("solve_constrained: rhs size mismatch");
    if (sys.A.rows() < sys.A.cols())
        throw std::invalid_argument("solve_constrained: underdetermined system");
    if (sys.A.rows() == sys.A.cols()) return solve_square(sys);
    return solve_least_squares(sys);
}

} // namespace kerrdiv
