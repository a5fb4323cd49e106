#include <doctest.h>

#include <cmath>

#include "kerrdiv/mode_solver.hpp"

using namespace kerrdiv;

namespace {

Grid1D coarse_grid() { return Grid1D::make(-20.0, 20.0, 0.1); }

const InterfaceMode& fig1_mode() {
    // Shared across cases; [-40, 40] at h1 = 0.01 resolves k0 to ~1e-4.
    static const InterfaceMode mode = [] {
        const DielectricProfile profile = DielectricProfile::fig1();
        const Grid1D grid = Grid1D::make(-40.0, 40.0, 0.01);
        DispersionOptions opt;
        opt.method = DispersionOptions::Method::ShiftInvert;
        const auto c = solve_dispersion(profile, 3.0, grid, 4, opt);
        REQUIRE(!c.empty());
        return reconstruct_mode(c.front().w3, profile, 3.0, c.front().k0, grid);
    }();
    return mode;
}

} // namespace

TEST_CASE("grid requires interface alignment") {
    CHECK_THROWS_AS(Grid1D::make(-1.05, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D::make(1.0, 2.0, 0.1), std::invalid_argument);
    const Grid1D g = Grid1D::make(-2.0, 1.0, 0.25);
    CHECK(g.n_points() == 13);
    CHECK(g.interface_index() == 8);
    CHECK(g.point(g.interface_index()) == doctest::Approx(0.0));
}

TEST_CASE("fig1 profile jump ratio") {
    CHECK(DielectricProfile::fig1().nu() == doctest::Approx(1.0));
}

TEST_CASE("profile positivity is enforced") {
    const auto bad = DielectricProfile::piecewise_constant(-1.0, 2.0);
    CHECK_THROWS_AS(assemble_eigenproblem(bad, 3.0, Grid1D::make(-2, 2, 0.5)),
                    std::domain_error);
}

TEST_CASE("interior stencil reduces to the second difference") {
    // eps1 = 1 on both sides, omega = 0: rows away from boundaries and the
    // interface must carry (-1, 2, -1) / h^2.
    const auto profile = DielectricProfile::piecewise_constant(1.0, 1.0);
    const Grid1D grid = Grid1D::make(-0.4, 0.4, 0.1);
    const EigenPair ep = assemble_eigenproblem(profile, 0.0, grid);
    const Eigen::MatrixXd A = ep.dense_A();
    const double inv_h2 = 100.0;
    for (int i : {1, 2, 5, 6}) {
        CHECK(A(i, i - 1) == doctest::Approx(-inv_h2));
        CHECK(A(i, i) == doctest::Approx(2.0 * inv_h2));
        CHECK(A(i, i + 1) == doctest::Approx(-inv_h2));
    }
}

TEST_CASE("continuous profile gives a vanishing splitting operator") {
    const auto profile = DielectricProfile::piecewise_constant(1.0, 1.0);
    const Grid1D grid = Grid1D::make(-1.0, 1.0, 0.1);
    const EigenPair ep = assemble_eigenproblem(profile, 2.0, grid);
    CHECK(ep.nu == doctest::Approx(0.0));
    CHECK(ep.a.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(ep.g.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK((ep.dense_A() - Eigen::MatrixXd(ep.T0)).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0));
}

TEST_CASE("dense and shift-invert paths agree") {
    const DielectricProfile profile = DielectricProfile::fig1();
    const Grid1D grid = coarse_grid();
    DispersionOptions dense, arnoldi;
    dense.method = DispersionOptions::Method::Dense;
    arnoldi.method = DispersionOptions::Method::ShiftInvert;
    const auto cd = solve_dispersion(profile, 3.0, grid, 2, dense);
    const auto ca = solve_dispersion(profile, 3.0, grid, 2, arnoldi);
    REQUIRE(!cd.empty());
    REQUIRE(!ca.empty());
    CHECK(cd.front().k0 == doctest::Approx(ca.front().k0).epsilon(1e-9));
}

TEST_CASE("fig1 dispersion reproduces the reference eigenvalue") {
    const InterfaceMode& mode = fig1_mode();
    CHECK(mode.k0 == doctest::Approx(3.4352).epsilon(0.01 / 3.4352));
    CHECK(mode.nu == doctest::Approx(1.0));
    // Normalization: max|w3| = 1 and w3(0) > 0.
    CHECK(mode.w3.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    CHECK(mode.w3[mode.grid.interface_index()] > 0.0);
}

TEST_CASE("eigenpair residual invariant") {
    const DielectricProfile profile = DielectricProfile::fig1();
    const Grid1D grid = coarse_grid();
    DispersionOptions opt;
    opt.method = DispersionOptions::Method::ShiftInvert;
    const auto cands = solve_dispersion(profile, 3.0, grid, 4, opt);
    REQUIRE(!cands.empty());
    const EigenPair ep = assemble_eigenproblem(profile, 3.0, grid);
    for (const ModeCandidate& c : cands) {
        const Eigen::VectorXd& v = c.eigenvector;
        const double lambda = c.k0 * c.k0;
        const double res = (ep.apply_A(v) - lambda * ep.apply_B(v)).norm() / v.norm();
        CHECK(res <= 1e-8);
        CHECK(c.eig_residual <= 1e-8);
    }
}

TEST_CASE("piecewise-constant positive profiles have no localized mode") {
    const auto profile = DielectricProfile::piecewise_constant(2.0, 0.5);
    const Grid1D grid = coarse_grid();
    for (double omega : {1.0, 2.0, 3.0}) {
        DispersionOptions opt;
        opt.method = DispersionOptions::Method::ShiftInvert;
        CHECK(solve_dispersion(profile, omega, grid, 4, opt).empty());
    }
}

TEST_CASE("doubling the truncation changes k0 below 1e-6") {
    const DielectricProfile profile = DielectricProfile::fig1();
    DispersionOptions opt;
    opt.method = DispersionOptions::Method::ShiftInvert;
    const auto c1 = solve_dispersion(profile, 3.0, Grid1D::make(-40, 40, 0.01), 1, opt);
    const auto c2 = solve_dispersion(profile, 3.0, Grid1D::make(-80, 80, 0.01), 1, opt);
    REQUIRE(!c1.empty());
    REQUIRE(!c2.empty());
    CHECK(std::fabs(c1.front().k0 - c2.front().k0) < 1e-6);
}

TEST_CASE("eigenvalue self-convergence under grid refinement") {
    const DielectricProfile profile = DielectricProfile::fig1();
    DispersionOptions opt;
    opt.method = DispersionOptions::Method::ShiftInvert;
    double k[3];
    const double hs[3] = {0.04, 0.02, 0.01};
    for (int i = 0; i < 3; ++i) {
        const auto c = solve_dispersion(profile, 3.0, Grid1D::make(-40, 40, hs[i]), 1, opt);
        REQUIRE(!c.empty());
        k[i] = c.front().k0;
    }
    CHECK(std::fabs(k[0] - k[1]) > std::fabs(k[1] - k[2]));
}

TEST_CASE("mirror symmetry of the dispersion problem") {
    const DielectricProfile profile = DielectricProfile::fig1();
    const DielectricProfile mirrored = profile.mirrored();
    DispersionOptions opt;
    opt.method = DispersionOptions::Method::ShiftInvert;
    const Grid1D grid = Grid1D::make(-40, 40, 0.01);
    const auto c = solve_dispersion(profile, 3.0, grid, 1, opt);
    const auto cm = solve_dispersion(mirrored, 3.0, grid, 1, opt);
    REQUIRE(!c.empty());
    REQUIRE(!cm.empty());
    CHECK(cm.front().k0 == doctest::Approx(c.front().k0).epsilon(2e-4));

    const InterfaceMode m = reconstruct_mode(c.front().w3, profile, 3.0, c.front().k0, grid);
    const InterfaceMode mm = reconstruct_mode(cm.front().w3, mirrored, 3.0, cm.front().k0, grid);
    const int n = grid.n_points();
    double max_diff = 0.0;
    for (int i = 0; i < n; ++i)
        max_diff = std::max(max_diff, std::fabs(mm.w3[i] - m.w3[n - 1 - i]));
    CHECK(max_diff < 5e-3);
}

TEST_CASE("reconstruct_mode handles trivial and scaled input") {
    const DielectricProfile profile = DielectricProfile::fig1();
    const Grid1D grid = Grid1D::make(-1.0, 1.0, 0.1);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(grid.n_points());
    const InterfaceMode m0 = reconstruct_mode(zero, profile, 3.0, 3.4, grid);
    CHECK(m0.w1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(m0.w2_imag.cwiseAbs().maxCoeff() == 0.0);
    CHECK(m0.w3.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(reconstruct_mode(zero, profile, 0.0, 3.4, grid), std::invalid_argument);

    // Scaling or flipping the input leaves the normalized mode unchanged.
    const InterfaceMode& ref = fig1_mode();
    const InterfaceMode flipped =
        reconstruct_mode(-ref.w3, DielectricProfile::fig1(), ref.omega0, ref.k0, ref.grid);
    const InterfaceMode scaled =
        reconstruct_mode(2.5 * ref.w3, DielectricProfile::fig1(), ref.omega0, ref.k0, ref.grid);
    CHECK((flipped.w3 - ref.w3).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK((scaled.w1 - ref.w1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("verify_mode diagnostics on the reference mode") {
    const DielectricProfile profile = DielectricProfile::fig1();
    const InterfaceMode& mode = fig1_mode();
    const ModeReport rep = verify_mode(mode, profile);

    // Interface conditions hold to discretization accuracy, O(h1^2) with a
    // constant of a few units; the fixture grid has h1 = 0.01.
    CHECK(std::fabs(rep.jump_w3) / rep.max_w3 < 2e-3);
    CHECK(std::fabs(rep.jump_w2) / rep.max_w2 < 2e-3);
    CHECK(std::fabs(rep.jump_eps1w1) / rep.max_eps1w1 < 2e-3);

    // Constant left side: explicit decay rate sqrt(k0^2 - omega0^2).
    const double expected = std::sqrt(mode.k0 * mode.k0 - 9.0);
    CHECK(rep.left_decay_rate == doctest::Approx(expected).epsilon(0.01));
    CHECK(rep.right_decay_tail < 1e-8);

    // Perturbing k0 by 10% inflates the operator residual.
    const double perturbed = mode_residual_at_k(mode, profile, 1.1 * mode.k0);
    CHECK(perturbed > 10.0 * rep.residual_L);
}

TEST_CASE("verify_mode on the zero mode") {
    const DielectricProfile profile = DielectricProfile::fig1();
    const Grid1D grid = Grid1D::make(-1.0, 1.0, 0.1);
    const InterfaceMode m0 =
        reconstruct_mode(Eigen::VectorXd::Zero(grid.n_points()), profile, 3.0, 3.4, grid);
    const ModeReport rep = verify_mode(m0, profile);
    CHECK(rep.jump_w3 == 0.0);
    CHECK(rep.jump_w2 == 0.0);
    CHECK(rep.jump_eps1w1 == 0.0);
    CHECK(rep.residual_L == 0.0);
    CHECK(rep.left_decay_rate == 0.0);
}
