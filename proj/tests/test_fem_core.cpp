#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include <Eigen/Dense>

#include "kerrdiv/assembly.hpp"
#include "kerrdiv/linear_solver.hpp"
#include "kerrdiv/mesh.hpp"

using namespace kerrdiv;

namespace {

const ScalarField2D kUnitCoeff = [](const Eigen::Vector2d&) { return 1.0; };

// Relative L2 and H1-seminorm errors of nodal coefficients against an exact
// solution, by the 3-point edge-midpoint rule.
void errors_against(const SideMesh& mesh, const Eigen::VectorXd& uh,
                    const std::function<double(double, double)>& u,
                    const std::function<Eigen::Vector2d(double, double)>& grad_u, double& l2,
                    double& h1) {
    double el2 = 0.0, eh1 = 0.0;
    std::array<Eigen::Vector2d, 3> grad;
    double area = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        mesh.gradients(t, grad, area);
        const Triangle& tr = mesh.tri(t);
        const Eigen::Vector2d gh = uh[tr.v[0]] * grad[0] + uh[tr.v[1]] * grad[1] +
                                   uh[tr.v[2]] * grad[2];
        const auto qp = mesh.edge_midpoints(t);
        const double vals[3] = {
            0.5 * (uh[tr.v[0]] + uh[tr.v[1]]),
            0.5 * (uh[tr.v[1]] + uh[tr.v[2]]),
            0.5 * (uh[tr.v[2]] + uh[tr.v[0]]),
        };
        for (int q = 0; q < 3; ++q) {
            const double diff = vals[q] - u(qp[q][0], qp[q][1]);
            el2 += area / 3.0 * diff * diff;
            eh1 += area / 3.0 * (gh - grad_u(qp[q][0], qp[q][1])).squaredNorm();
        }
    }
    l2 = std::sqrt(el2);
    h1 = std::sqrt(eh1);
}

// Pure-Neumann Poisson solve with a zero-mean constraint row.
Eigen::VectorXd neumann_solve(const SideMesh& mesh, const ScalarField2D& f) {
    const Eigen::SparseMatrix<double> K = assemble_stiffness(mesh, kUnitCoeff);
    const Eigen::VectorXd load = assemble_scalar_load(mesh, f);
    const Eigen::VectorXd areas = node_areas(mesh);
    const int n = mesh.n_nodes();
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < K.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int j = 0; j < n; ++j) trip.emplace_back(n, j, areas[j]);
    SparseSystem sys;
    sys.A.resize(n + 1, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.rhs.resize(n + 1);
    sys.rhs.head(n) = load;
    sys.rhs[n] = 0.0;
    sys.n_constraints = 1;
    return solve_constrained(sys);
}

} // namespace

TEST_CASE("structured mesh counting") {
    const TransmissionMesh unit = build_mesh(Rect{-1, 0, 0, 1}, Rect{0, 1, 0, 1}, 1.0);
    CHECK(unit.side(Side::Minus).n_nodes() == 4);
    CHECK(unit.side(Side::Plus).n_nodes() == 4);
    CHECK(unit.side(Side::Minus).n_triangles() == 2);
    CHECK(unit.side(Side::Plus).n_triangles() == 2);
    CHECK(unit.n_interface() == 2);

    const TransmissionMesh reference =
        build_mesh(Rect{-6, 0, -6, 6}, Rect{0, 6, -6, 6}, 0.25);
    CHECK(reference.side(Side::Minus).n_nodes() == 25 * 49);
    CHECK(reference.side(Side::Plus).n_nodes() == 25 * 49);
    CHECK(reference.side(Side::Minus).n_triangles() == 2 * 24 * 48);

    const TransmissionMesh fine = build_mesh(Rect{-6, 0, -6, 6}, Rect{0, 6, -6, 6}, 0.125);
    CHECK(fine.side(Side::Plus).n_triangles() == 4 * reference.side(Side::Plus).n_triangles());

    CHECK_THROWS_AS(build_mesh(Rect{-1, 0, 0, 1}, Rect{0, 1, 0, 1}, 0.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(Rect{-1, -0.1, 0, 1}, Rect{0, 1, 0, 1}, 0.1),
                    std::invalid_argument);
}

TEST_CASE("interface node ordering") {
    const TransmissionMesh mesh = build_mesh(Rect{-2, 0, -1, 1}, Rect{0, 2, -1, 1}, 0.5);
    const auto& nodes = mesh.interface_nodes(Side::Plus);
    REQUIRE(static_cast<int>(nodes.size()) == mesh.n_interface());
    for (size_t j = 0; j + 1 < nodes.size(); ++j) {
        CHECK(mesh.side(Side::Plus).node(nodes[j])[1] <
              mesh.side(Side::Plus).node(nodes[j + 1])[1]);
        CHECK(mesh.side(Side::Plus).node(nodes[j])[0] == doctest::Approx(0.0));
    }
}

TEST_CASE("element stiffness of a right triangle") {
    // Legs h, right-angle vertex first: (1/2) [[2,-1,-1],[-1,1,0],[-1,0,1]].
    const SideMesh mesh(Rect{0, 2, 0, 2}, 2.0);
    std::array<Eigen::Vector2d, 3> grad;
    double area = 0.0;
    mesh.gradients(0, grad, area);  // vertices a=(0,0), b=(2,0), c=(2,2); right angle at b
    CHECK(area == doctest::Approx(2.0));
    auto k = [&](int i, int j) { return area * grad[i].dot(grad[j]); };
    CHECK(k(1, 1) == doctest::Approx(1.0));
    CHECK(k(1, 0) == doctest::Approx(-0.5));
    CHECK(k(1, 2) == doctest::Approx(-0.5));
    CHECK(k(0, 2) == doctest::Approx(0.0));
    CHECK(k(0, 0) == doctest::Approx(0.5));
    CHECK(k(2, 2) == doctest::Approx(0.5));
}

TEST_CASE("stiffness kernel, symmetry and linearity") {
    const SideMesh mesh(Rect{0, 1, 0, 1}, 0.25);
    const Eigen::SparseMatrix<double> K1 = assemble_stiffness(mesh, kUnitCoeff);
    const Eigen::SparseMatrix<double> K2 =
        assemble_stiffness(mesh, [](const Eigen::Vector2d&) { return 2.0; });

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_nodes());
    CHECK((K1 * ones).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Eigen::MatrixXd(K2) - 2.0 * Eigen::MatrixXd(K1)).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::MatrixXd D1 = Eigen::MatrixXd(K1);
    CHECK((D1 - D1.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D1);
    int zeros = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        CHECK(es.eigenvalues()[i] > -1e-12);
        if (std::fabs(es.eigenvalues()[i]) < 1e-10) ++zeros;
    }
    CHECK(zeros == 1);
}

TEST_CASE("interface mass matrix") {
    const TransmissionMesh two = build_mesh(Rect{-1, 0, 0, 1}, Rect{0, 1, 0, 1}, 0.5);
    const Eigen::SparseMatrix<double> M = assemble_interface_mass(two);
    const Eigen::MatrixXd D(M);
    CHECK(D.rows() == 3);
    CHECK(D.sum() == doctest::Approx(1.0));  // interface length
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(D(0, 0) == doctest::Approx(0.5 / 3.0));
    CHECK(D(1, 1) == doctest::Approx(2.0 * 0.5 / 3.0));
    CHECK(D(0, 1) == doctest::Approx(0.5 / 6.0));
    // Row sums integrate the hats: h for the interior node, h/2 at the ends.
    CHECK(D.row(0).sum() == doctest::Approx(0.25));
    CHECK(D.row(1).sum() == doctest::Approx(0.5));
}

TEST_CASE("flux load oracle") {
    const SideMesh mesh(Rect{0, 1, 0, 1}, 1.0);
    const Eigen::VectorXd zero =
        assemble_flux_load(mesh, [](const Eigen::Vector2d&) { return Eigen::Vector2d(0, 0); });
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

    // flux = grad(x^2) = (2x, 0): hand integration gives
    //   a: 2/3, b: -2/3, c: -1/3, d: 1/3 on the unit square split.
    const Eigen::VectorXd load = assemble_flux_load(
        mesh, [](const Eigen::Vector2d& x) { return Eigen::Vector2d(2.0 * x[0], 0.0); });
    CHECK(load[0] == doctest::Approx(2.0 / 3.0));
    CHECK(load[1] == doctest::Approx(-2.0 / 3.0));
    CHECK(load[3] == doctest::Approx(-1.0 / 3.0));
    CHECK(load[2] == doctest::Approx(1.0 / 3.0));

    // Constant flux: interior nodes get zero.
    const SideMesh grid(Rect{0, 2, 0, 2}, 1.0);
    const Eigen::VectorXd cst =
        assemble_flux_load(grid, [](const Eigen::Vector2d&) { return Eigen::Vector2d(3, -2); });
    CHECK(std::fabs(cst[grid.node_index(1, 1)]) < 1e-14);
}

TEST_CASE("solve_constrained on an identity system") {
    SparseSystem sys;
    sys.A.resize(4, 4);
    sys.A.setIdentity();
    sys.rhs.resize(4);
    sys.rhs << 1, -2, 3, 0.5;
    const Eigen::VectorXd x = solve_constrained(sys);
    CHECK((x - sys.rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pure Neumann Poisson with a zero-mean constraint") {
    const SideMesh mesh(Rect{0, 1, 0, 1}, 0.125);
    auto u = [](double x, double y) { return std::cos(M_PI * x) * std::cos(M_PI * y); };
    const Eigen::VectorXd x = neumann_solve(mesh, [&](const Eigen::Vector2d& p) {
        return 2.0 * M_PI * M_PI * u(p[0], p[1]);
    });
    CHECK(std::fabs(node_areas(mesh).dot(x)) < 1e-10);
    double l2 = 0.0, h1 = 0.0;
    errors_against(mesh, x, u, [](double xx, double yy) {
        return Eigen::Vector2d(-M_PI * std::sin(M_PI * xx) * std::cos(M_PI * yy),
                               -M_PI * std::cos(M_PI * xx) * std::sin(M_PI * yy));
    }, l2, h1);
    CHECK(l2 < 0.05);
}

TEST_CASE("manufactured-solution convergence orders") {
    auto u = [](double x, double y) { return std::cos(M_PI * x) * std::cos(M_PI * y); };
    auto grad_u = [](double x, double y) {
        return Eigen::Vector2d(-M_PI * std::sin(M_PI * x) * std::cos(M_PI * y),
                               -M_PI * std::cos(M_PI * x) * std::sin(M_PI * y));
    };
    std::vector<double> l2s, h1s;
    for (double h : {0.25, 0.125, 0.0625}) {
        const SideMesh mesh(Rect{0, 1, 0, 1}, h);
        const Eigen::VectorXd x = neumann_solve(mesh, [&](const Eigen::Vector2d& p) {
            return 2.0 * M_PI * M_PI * u(p[0], p[1]);
        });
        double l2 = 0.0, h1 = 0.0;
        errors_against(mesh, x, u, grad_u, l2, h1);
        l2s.push_back(l2);
        h1s.push_back(h1);
    }
    for (size_t i = 0; i + 1 < l2s.size(); ++i) {
        CHECK(std::log2(l2s[i] / l2s[i + 1]) > 1.8);
        CHECK(std::log2(h1s[i] / h1s[i + 1]) > 0.9);
    }
}

TEST_CASE("triplet dump round trip") {
    const SideMesh mesh(Rect{0, 1, 0, 1}, 0.5);
    const Eigen::SparseMatrix<double> K = assemble_stiffness(mesh, kUnitCoeff);
    const std::string path = "/tmp/kerrdiv_triplets.txt";
    dump_triplets(K, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    int r = 0, c = 0, count = 0;
    double v = 0.0;
    Eigen::MatrixXd back = Eigen::MatrixXd::Zero(K.rows(), K.cols());
    while (in >> r >> c >> v) {
        back(r, c) += v;
        ++count;
    }
    CHECK(count == K.nonZeros());
    CHECK((back - Eigen::MatrixXd(K)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("singular square system raises") {
    SparseSystem sys;
    sys.A.resize(3, 3);
    std::vector<Eigen::Triplet<double>> trip{{0, 0, 1.0}, {1, 1, 1.0}};
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.rhs = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(solve_constrained(sys), SingularSystemError);
}
