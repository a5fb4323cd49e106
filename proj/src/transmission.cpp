#include "kerrdiv/transmission.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "kerrdiv/linear_solver.hpp"

namespace kerrdiv {

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    if (p != 3) throw std::invalid_argument("SolverConfig: only the Kerr exponent p = 3 is supported");
    if (!(theta > 0.0) || theta > 1.0)
        throw std::invalid_argument("SolverConfig: theta must lie in (0, 1]");
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::invalid_argument("SolverConfig: eps must lie in (0, 1)");
    if (!(h > 0.0)) throw std::invalid_argument("SolverConfig: h must be positive");
    if (eps3_scale < 0.0) throw std::invalid_argument("SolverConfig: eps3_scale must be >= 0");
}

namespace {

Eigen::Vector2d kerr_flux(const Eigen::Vector2d& u0, const Eigen::Vector2d& grad_phi,
                          double eps1, double eps3) {
    const Eigen::Vector2d v = u0 + grad_phi;
    return eps1 * u0 + eps3 * v.squaredNorm() * v;
}

Eigen::Vector2d full_flux(const Eigen::Vector2d& u0, const Eigen::Vector2d& grad_phi,
                          double eps1, double eps3) {
    const Eigen::Vector2d v = u0 + grad_phi;
    return eps1 * v + eps3 * v.squaredNorm() * v;
}

} // namespace

TransmissionProblem::TransmissionProblem(const InterfaceMode& mode,
                                         const DielectricProfile& profile,
                                         const Envelope& envelope, const SolverConfig& config)
    : mode_(mode), profile_(profile), config_(config),
      mesh_([&config] {
          config.validate();
          return TransmissionMesh::build(config.bounds_minus, config.bounds_plus, config.h);
      }()),
      field_(mode_, profile_, envelope, config.eps) {
    np_ = mesh_.side(Side::Plus).n_nodes();
    nm_ = mesh_.side(Side::Minus).n_nodes();
    ni_ = mesh_.n_interface();

    for (Side s : {Side::Minus, Side::Plus}) {
        const int i = side_index(s);
        stiffness_[i] = assemble_stiffness(mesh_.side(s),
                                           [&](const Eigen::Vector2d& x) { return profile_.eps1(x[0]); });
        areas_[i] = node_areas(mesh_.side(s));
        domain_area_[i] = areas_[i].sum();
    }
    interface_mass_ = assemble_interface_mass(mesh_);
    build_quad_cache(mesh_, quads_);

    // Square coupled system over [Phi+, Phi-, G].
    const int total = np_ + nm_ + ni_;
    const int goff = np_ + nm_;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(stiffness_[0].nonZeros() + stiffness_[1].nonZeros() +
                                     4 * ni_ + 8 * ni_ + 2));

    const auto& Kp = stiffness_[side_index(Side::Plus)];
    for (int k = 0; k < Kp.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(Kp, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());

    // The minus weak row of the gauge node is the known redundant row; its
    // slot holds the minus pin instead.
    const auto& Km = stiffness_[side_index(Side::Minus)];
    for (int k = 0; k < Km.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(Km, k); it; ++it)
            if (it.row() != 0)
                trip.emplace_back(np_ + static_cast<int>(it.row()),
                                  np_ + static_cast<int>(it.col()), it.value());
    trip.emplace_back(np_, np_, 1.0);

    const auto& ifp = mesh_.interface_nodes(Side::Plus);
    const auto& ifm = mesh_.interface_nodes(Side::Minus);
    for (int k = 0; k < interface_mass_.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(interface_mass_, k); it; ++it) {
            const int j = static_cast<int>(it.row());
            const int g = static_cast<int>(it.col());
            trip.emplace_back(ifp[j], goff + g, it.value());
            if (ifm[j] != 0)
                trip.emplace_back(np_ + ifm[j], goff + g, -it.value());
        }
    }

    for (int e = 0; e + 1 < ni_; ++e) {
        const int row = np_ + nm_ + e;
        trip.emplace_back(row, ifp[e + 1], 1.0);
        trip.emplace_back(row, ifp[e], -1.0);
        trip.emplace_back(row, np_ + ifm[e + 1], -1.0);
        trip.emplace_back(row, np_ + ifm[e], 1.0);
    }
    trip.emplace_back(total - 1, np_ - 1, 1.0);

    system_.resize(total, total);
    system_.setFromTriplets(trip.begin(), trip.end());
    system_.makeCompressed();
    system_lu_.compute(system_);
    if (system_lu_.info() != Eigen::Success)
        throw SingularSystemError("TransmissionProblem: coupled system factorization failed");

    build_glued(mesh_, glued_, n_glued_);
    {
        std::vector<Eigen::Triplet<double>> mt;
        for (Side s : {Side::Minus, Side::Plus}) {
            const int i = side_index(s);
            const Eigen::SparseMatrix<double> M = assemble_mass(mesh_.side(s));
            for (int k = 0; k < M.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
                    mt.emplace_back(glued_[i][it.row()], glued_[i][it.col()], it.value());
        }
        Eigen::SparseMatrix<double> Mg(n_glued_, n_glued_);
        Mg.setFromTriplets(mt.begin(), mt.end());
        glued_mass_llt_.compute(Mg);
        if (glued_mass_llt_.info() != Eigen::Success)
            throw SingularSystemError("TransmissionProblem: glued mass factorization failed");
    }
}

void TransmissionProblem::build_glued(const TransmissionMesh& mesh, std::vector<int> glued[2],
                                      int& n_glued) {
    const int np = mesh.side(Side::Plus).n_nodes();
    const int nm = mesh.side(Side::Minus).n_nodes();
    glued[side_index(Side::Plus)].resize(np);
    for (int j = 0; j < np; ++j) glued[side_index(Side::Plus)][j] = j;
    glued[side_index(Side::Minus)].assign(nm, -1);
    int next = np;
    for (int j = 0; j < nm; ++j) {
        const int loc = mesh.interface_local(Side::Minus, j);
        glued[side_index(Side::Minus)][j] =
            loc >= 0 ? mesh.interface_nodes(Side::Plus)[loc] : next++;
    }
    n_glued = next;
}

void TransmissionProblem::build_quad_cache(const TransmissionMesh& mesh,
                                           std::vector<TriData> out[2]) const {
    const double eps = config_.eps;
    const double k0 = mode_.k0;
    for (Side s : {Side::Minus, Side::Plus}) {
        const SideMesh& sm = mesh.side(s);
        auto& dst = out[side_index(s)];
        dst.resize(sm.n_triangles());
        for (int t = 0; t < sm.n_triangles(); ++t) {
            TriData& td = dst[t];
            sm.gradients(t, td.grad, td.area);
            const auto qps = sm.edge_midpoints(t);
            for (int q = 0; q < 3; ++q) {
                QuadPoint& p = td.qp[q];
                p.x = qps[q];
                const double amp =
                    2.0 * eps * field_.envelope().value(eps * p.x[1]);
                p.u0 = Eigen::Vector2d(
                    amp * field_.w1_at(p.x[0], s) * std::cos(k0 * p.x[1]),
                    -amp * field_.w2_imag_at(p.x[0], s) * std::sin(k0 * p.x[1]));
                p.eps1 = profile_.eps1_side(p.x[0], s);
                p.eps3 = config_.eps3_scale * profile_.eps3_side(p.x[0], s);
            }
        }
    }
}

Eigen::VectorXd TransmissionProblem::side_rhs(const FemField& phi, Side side) const {
    const SideMesh& sm = mesh_.side(side);
    const auto& quads = quads_[side_index(side)];
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sm.n_nodes());
    for (int t = 0; t < sm.n_triangles(); ++t) {
        const TriData& td = quads[t];
        const Triangle& tr = sm.tri(t);
        const Eigen::Vector2d gp = phi.gradient(side, t);
        Eigen::Vector2d acc = Eigen::Vector2d::Zero();
        for (const QuadPoint& q : td.qp)
            acc += kerr_flux(q.u0, gp, q.eps1, q.eps3);
        acc *= td.area / 3.0;
        if (!acc.allFinite())
            throw std::runtime_error("TransmissionProblem: non-finite flux in assembly "
                                     "(diverged iterate)");
        for (int i = 0; i < 3; ++i) rhs[tr.v[i]] -= acc.dot(td.grad[i]);
    }
    return rhs;
}

Eigen::VectorXd TransmissionProblem::weak_residual(const FemField& phi, Side side) const {
    return stiffness_[side_index(side)] * phi.coeffs(side) - side_rhs(phi, side);
}

double TransmissionProblem::residual_norm(const FemField& phi) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n_glued_);
    for (Side s : {Side::Minus, Side::Plus}) {
        const int i = side_index(s);
        const Eigen::VectorXd wr = weak_residual(phi, s);
        for (int j = 0; j < wr.size(); ++j) r[glued_[i][j]] += wr[j];
    }
    const Eigen::VectorXd z = glued_mass_llt_.solve(r);
    return std::sqrt(std::max(0.0, r.dot(z)));
}

SolverState TransmissionProblem::initial_state() const {
    SolverState st;
    st.phi = FemField::zero(mesh_);
    st.flux = Eigen::VectorXd::Zero(ni_);
    st.residual_history.push_back(residual_norm(st.phi));
    st.converged = st.residual_history.front() == 0.0;
    return st;
}

SolverState TransmissionProblem::fixed_point_step(const SolverState& state) const {
    const int total = np_ + nm_ + ni_;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
    rhs.head(np_) = side_rhs(state.phi, Side::Plus);
    const Eigen::VectorXd rm = side_rhs(state.phi, Side::Minus);
    rhs.segment(np_ + 1, nm_ - 1) = rm.tail(nm_ - 1);

    Eigen::VectorXd x = system_lu_.solve(rhs);
    x += system_lu_.solve(Eigen::VectorXd(rhs - system_ * x));
    if (!x.allFinite())
        throw std::runtime_error("TransmissionProblem: linear solve produced non-finite values");

    SolverState next;
    next.phi.mesh = &mesh_;
    next.phi.plus = x.head(np_);
    next.phi.minus = x.segment(np_, nm_);
    next.flux = x.tail(ni_);
    if (config_.theta != 1.0) {
        next.phi.plus = config_.theta * next.phi.plus + (1.0 - config_.theta) * state.phi.plus;
        next.phi.minus = config_.theta * next.phi.minus + (1.0 - config_.theta) * state.phi.minus;
        next.flux = config_.theta * next.flux + (1.0 - config_.theta) * state.flux;
    }
    for (Side s : {Side::Minus, Side::Plus}) {
        const int i = side_index(s);
        Eigen::VectorXd& c = next.phi.coeffs(s);
        c.array() -= areas_[i].dot(c) / domain_area_[i];
    }

    next.residual_history = state.residual_history;
    next.residual_history.push_back(residual_norm(next.phi));
    const double first = next.residual_history.front();
    next.converged = next.residual_history.back() <= config_.tol * first;
    return next;
}

SolverState TransmissionProblem::solve(std::vector<IterationRecord>* log) const {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    SolverState state = initial_state();
    if (log) log->push_back({state.n(), state.residual_history.back(), elapsed()});
    while (!state.converged && state.n() < config_.max_iter) {
        state = fixed_point_step(state);
        if (log) log->push_back({state.n(), state.residual_history.back(), elapsed()});
    }
    return state;
}

double TransmissionProblem::grad_phi_l2(const FemField& phi) const {
    double acc = 0.0;
    for (Side s : {Side::Minus, Side::Plus}) {
        const auto& quads = quads_[side_index(s)];
        for (size_t t = 0; t < quads.size(); ++t)
            acc += quads[t].area * phi.gradient(s, static_cast<int>(t)).squaredNorm();
    }
    return std::sqrt(acc);
}

double TransmissionProblem::energy(const FemField& phi) const {
    double acc = 0.0;
    for (Side s : {Side::Minus, Side::Plus}) {
        const SideMesh& sm = mesh_.side(s);
        const auto& quads = quads_[side_index(s)];
        for (int t = 0; t < sm.n_triangles(); ++t) {
            const TriData& td = quads[t];
            const Eigen::Vector2d gp = phi.gradient(s, t);
            // eps1 |grad phi|^2 / 2 with the centroid coefficient matches the
            // stiffness block; the remaining terms use the 3-point rule.
            acc += 0.5 * profile_.eps1(sm.centroid(t)[0]) * td.area * gp.squaredNorm();
            double quartic = 0.0, coupling = 0.0;
            for (const QuadPoint& q : td.qp) {
                quartic += q.eps3 * 0.25 * std::pow((q.u0 + gp).squaredNorm(), 2);
                coupling += q.eps1 * q.u0.dot(gp);
            }
            acc += td.area / 3.0 * (quartic + coupling);
        }
    }
    return acc;
}

const TransmissionProblem::RefinedData& TransmissionProblem::refined() const {
    if (refined_) return *refined_;
    auto rd = std::make_unique<RefinedData>();
    rd->mesh = TransmissionMesh::build(config_.bounds_minus, config_.bounds_plus, config_.h / 2.0);
    build_quad_cache(rd->mesh, rd->tris);
    build_glued(rd->mesh, rd->glued, rd->n_glued);
    for (Side s : {Side::Minus, Side::Plus}) {
        const int i = side_index(s);
        const SideMesh& fine = rd->mesh.side(s);
        const SideMesh& coarse = mesh_.side(s);
        rd->coarse_tri[i].resize(fine.n_triangles());
        for (int t = 0; t < fine.n_triangles(); ++t)
            rd->coarse_tri[i][t] = coarse.locate(fine.centroid(t));
    }
    std::vector<Eigen::Triplet<double>> mt;
    for (Side s : {Side::Minus, Side::Plus}) {
        const int i = side_index(s);
        const Eigen::SparseMatrix<double> M = assemble_mass(rd->mesh.side(s));
        const Eigen::SparseMatrix<double> K =
            assemble_stiffness(rd->mesh.side(s), [](const Eigen::Vector2d&) { return 1.0; });
        for (int k = 0; k < M.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
                mt.emplace_back(rd->glued[i][it.row()], rd->glued[i][it.col()], it.value());
        for (int k = 0; k < K.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
                mt.emplace_back(rd->glued[i][it.row()], rd->glued[i][it.col()], it.value());
    }
    Eigen::SparseMatrix<double> H1(rd->n_glued, rd->n_glued);
    H1.setFromTriplets(mt.begin(), mt.end());
    rd->h1_llt.compute(H1);
    if (rd->h1_llt.info() != Eigen::Success)
        throw SingularSystemError("TransmissionProblem: refined H1 factorization failed");
    refined_ = std::move(rd);
    return *refined_;
}

double TransmissionProblem::div_D_norm(const FemField& phi) const {
    const RefinedData& rd = refined();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(rd.n_glued);
    for (Side s : {Side::Minus, Side::Plus}) {
        const int i = side_index(s);
        const SideMesh& fine = rd.mesh.side(s);
        for (int t = 0; t < fine.n_triangles(); ++t) {
            const TriData& td = rd.tris[i][t];
            const Triangle& tr = fine.tri(t);
            const Eigen::Vector2d gp = phi.gradient(s, rd.coarse_tri[i][t]);
            Eigen::Vector2d acc = Eigen::Vector2d::Zero();
            for (const QuadPoint& q : td.qp)
                acc += full_flux(q.u0, gp, q.eps1, q.eps3);
            acc *= td.area / 3.0;
            for (int j = 0; j < 3; ++j) d[rd.glued[i][tr.v[j]]] -= acc.dot(td.grad[j]);
        }
    }
    const Eigen::VectorXd z = rd.h1_llt.solve(d);
    return std::sqrt(std::max(0.0, d.dot(z)));
}

EstimateAudit TransmissionProblem::estimate_audit(const SolverState& state,
                                                  bool with_ansatz_norms) const {
    EstimateAudit audit;
    const FemField& phi = state.phi;

    for (Side s : {Side::Minus, Side::Plus}) {
        const auto& quads = quads_[side_index(s)];
        for (size_t t = 0; t < quads.size(); ++t) {
            const TriData& td = quads[t];
            const Eigen::Vector2d gp = phi.gradient(s, static_cast<int>(t));
            const double g2 = gp.squaredNorm();
            audit.lhs_22 += td.area * g2;
            double weighted = 0.0;
            for (const QuadPoint& q : td.qp) weighted += (q.u0 + gp).squaredNorm();
            audit.lhs_22 += td.area / 3.0 * weighted * g2;
        }
    }

    if (with_ansatz_norms) {
        const NormReport norms = field_.norms();
        audit.U0_L4_pow4 = std::pow(norms.U0_L4, 4);
        audit.b_L2_sq = norms.b_L2 * norms.b_L2;
        audit.b_L1log_sq = norms.b_L1log * norms.b_L1log;
        const double denom = audit.U0_L4_pow4 + audit.b_L2_sq + audit.b_L1log_sq;
        if (denom > 0.0) audit.ratio = audit.lhs_22 / denom;
    }

    audit.energy_J_phi = energy(phi);
    audit.energy_J_0 = energy(FemField::zero(mesh_));

    const auto& ifp = mesh_.interface_nodes(Side::Plus);
    const auto& ifm = mesh_.interface_nodes(Side::Minus);
    for (int e = 0; e + 1 < ni_; ++e) {
        const double dp = phi.plus[ifp[e + 1]] - phi.plus[ifp[e]];
        const double dm = phi.minus[ifm[e + 1]] - phi.minus[ifm[e]];
        audit.jump_tangential = std::max(audit.jump_tangential,
                                         std::fabs(dp - dm) / config_.h);
    }

    // One-sided normal flux along the interface, sampled per interface edge
    // from the adjacent triangle on each side.
    const SideMesh& smp = mesh_.side(Side::Plus);
    const SideMesh& smm = mesh_.side(Side::Minus);
    double acc = 0.0;
    for (int e = 0; e + 1 < ni_; ++e) {
        const Eigen::Vector2d mid(0.0, 0.5 * (smp.node(ifp[e])[1] + smp.node(ifp[e + 1])[1]));
        const int tp = smp.locate(Eigen::Vector2d(1e-12, mid[1]));
        const int tm = smm.locate(Eigen::Vector2d(-1e-12, mid[1]));
        const Eigen::Vector2d u0p = field_.u0(mid, Side::Plus);
        const Eigen::Vector2d u0m = field_.u0(mid, Side::Minus);
        const double e3p = config_.eps3_scale * profile_.eps3_plus0();
        const double e3m = config_.eps3_scale * profile_.eps3_minus0();
        const double Dp = full_flux(u0p, phi.gradient(Side::Plus, tp), profile_.eps1_plus0(), e3p)[0];
        const double Dm = full_flux(u0m, phi.gradient(Side::Minus, tm), profile_.eps1_minus0(), e3m)[0];
        acc += config_.h * (Dp - Dm) * (Dp - Dm);
    }
    audit.jump_flux = std::sqrt(acc);
    return audit;
}

} // namespace kerrdiv
