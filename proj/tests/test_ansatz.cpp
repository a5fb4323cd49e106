#include <doctest.h>

#include <cmath>
#include <vector>

#include "kerrdiv/ansatz.hpp"

using namespace kerrdiv;

namespace {

struct Fixture {
    DielectricProfile profile = DielectricProfile::fig1();
    InterfaceMode mode;
};

const Fixture& fixture() {
    static const Fixture fx = [] {
        Fixture f;
        const Grid1D grid = Grid1D::make(-30.0, 30.0, 0.005);
        DispersionOptions opt;
        opt.method = DispersionOptions::Method::ShiftInvert;
        const auto c = solve_dispersion(f.profile, 3.0, grid, 1, opt);
        REQUIRE(!c.empty());
        f.mode = reconstruct_mode(c.front().w3, f.profile, 3.0, c.front().k0, grid);
        return f;
    }();
    return fx;
}

// Central-difference divergence of eps1 U0, one side of the interface.
double brute_force_divergence(const AnsatzField& field, const DielectricProfile& profile,
                              const Eigen::Vector2d& x, double delta) {
    auto flux1 = [&](double x1, double x2) {
        return profile.eps1(x1) * field.u0(Eigen::Vector2d(x1, x2))[0];
    };
    auto flux2 = [&](double x1, double x2) {
        return profile.eps1(x1) * field.u0(Eigen::Vector2d(x1, x2))[1];
    };
    return (flux1(x[0] + delta, x[1]) - flux1(x[0] - delta, x[1])) / (2 * delta) +
           (flux2(x[0], x[1] + delta) - flux2(x[0], x[1] - delta)) / (2 * delta);
}

} // namespace

TEST_CASE("zero envelope gives the zero field") {
    const Fixture& fx = fixture();
    const AnsatzField field(fx.mode, fx.profile, Envelope::zero(), 1e-3);
    CHECK(field.u0({0.3, 1.2}).norm() == 0.0);
    CHECK(field.b({-0.5, 2.0}) == 0.0);
    const NormReport n = field.norms(10.0);
    CHECK(n.U0_L2 == 0.0);
    CHECK(n.U0_L4 == 0.0);
    CHECK(n.b_L2 == 0.0);
    CHECK(n.b_L1log == 0.0);
}

TEST_CASE("structural zeros of the ansatz") {
    const Fixture& fx = fixture();
    const AnsatzField field(fx.mode, fx.profile, Envelope::gaussian(1.0), 0.05);
    // sin(k0 x2) = 0 at x2 = 0 kills the second component and b.
    CHECK(field.u0({0.7, 0.0})[1] == 0.0);
    CHECK(field.b({0.7, 0.0}) == 0.0);
    // Constant envelope: b is proportional to the envelope derivative.
    const AnsatzField flat(fx.mode, fx.profile, Envelope::constant(1.0), 0.05);
    CHECK(flat.b({0.7, 1.3}) == 0.0);
    CHECK(flat.b({-1.1, 0.4}) == 0.0);
    // Outside the mode grid the components vanish.
    CHECK(field.u0({35.0, 1.0}).norm() == 0.0);
}

TEST_CASE("interface continuity of the ansatz components") {
    const Fixture& fx = fixture();
    const AnsatzField field(fx.mode, fx.profile, Envelope::gaussian(1.0), 0.05);
    const double x2 = 0.37;
    const Eigen::Vector2d um = field.u0({0.0, x2}, Side::Minus);
    const Eigen::Vector2d up = field.u0({0.0, x2}, Side::Plus);
    // eps1 U0_1 is continuous exactly (both sides reduce to -k/omega w3(0)).
    CHECK(fx.profile.eps1_minus0() * um[0] ==
          doctest::Approx(fx.profile.eps1_plus0() * up[0]).epsilon(1e-12));
    // U0_2 is continuous up to the w2 reconstruction error, O(h1^2).
    CHECK(std::fabs(um[1] - up[1]) <= 1e-4 * std::fabs(up[1]) + 1e-12);
}

TEST_CASE("reduced b matches the brute-force divergence of eps1 U0") {
    // O(1)-scale parameters keep the genuine signal above the interpolation
    // floor of the sampled mode.
    const Fixture& fx = fixture();
    const AnsatzField field(fx.mode, fx.profile, Envelope::gaussian(1.0), 0.3);
    for (const Eigen::Vector2d x : {Eigen::Vector2d(-1.3, 0.8), Eigen::Vector2d(0.9, 1.7)}) {
        const double b = field.b(x);
        const double scale = std::fabs(b) + 1e-12;
        REQUIRE(std::fabs(b) > 1e-6);
        for (double delta : {2e-3, 1e-3}) {
            const double fd = brute_force_divergence(field, fx.profile, x, delta);
            CHECK(std::fabs(fd - b) <= 1e-3 * scale);
        }
    }
}

TEST_CASE("norm scalings in eps") {
    const Fixture& fx = fixture();
    const Envelope envelope = Envelope::gaussian(5e6);

    const NormReport n1 = AnsatzField(fx.mode, fx.profile, envelope, 4e-4).norms();
    const NormReport n2 = AnsatzField(fx.mode, fx.profile, envelope, 2e-4).norms();
    CHECK(n1.U0_L2 / n2.U0_L2 == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
    CHECK(n1.b_L2 / n2.b_L2 == doctest::Approx(std::pow(2.0, 1.5)).epsilon(0.02));

    // The scaling decade needs the envelope wide against the carrier period,
    // i.e. eps well below k0 * envelope width in the slow variable.
    std::vector<double> eps{1e-4, 5e-5, 2e-5, 1e-5};
    std::vector<double> l2, l4, b2, blog;
    for (double e : eps) {
        const NormReport n = AnsatzField(fx.mode, fx.profile, envelope, e).norms();
        l2.push_back(n.U0_L2);
        l4.push_back(n.U0_L4);
        b2.push_back(n.b_L2);
        blog.push_back(n.b_L1log);
    }
    CHECK(fit_loglog_slope(eps, l2) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(fit_loglog_slope(eps, l4) == doctest::Approx(0.75).epsilon(0.067));
    CHECK(fit_loglog_slope(eps, b2) == doctest::Approx(1.5).epsilon(0.034));
    // L1(log) norm: bounded against eps^{1-gamma} with gamma = 0.25. The
    // ratio behaves like eps^{0.25} log(1/eps), so it is bounded but not
    // locally monotone; measured values sit near 0.32.
    for (size_t i = 0; i < eps.size(); ++i) {
        const double r = blog[i] / std::pow(eps[i], 0.75);
        CHECK(r <= 1.0);
        CHECK(r > 0.0);
    }
}

TEST_CASE("norms reject a non-decaying envelope without an explicit domain") {
    const Fixture& fx = fixture();
    const AnsatzField field(fx.mode, fx.profile, Envelope::constant(1.0), 0.05);
    CHECK_THROWS_AS(field.norms(), std::domain_error);
}
