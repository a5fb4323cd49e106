#include "kerrdiv/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "kerrdiv/ansatz.hpp"
#include "kerrdiv/csv.hpp"
#include "kerrdiv/mode_solver.hpp"
#include "kerrdiv/svg_plot.hpp"
#include "kerrdiv/transmission.hpp"

namespace kerrdiv {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

DispersionOptions dispersion_options(const RunConfig& cfg) {
    DispersionOptions opt;
    opt.shift = cfg.shift;
    opt.decay_tol = cfg.decay_tol;
    if (cfg.mode_method == "dense") opt.method = DispersionOptions::Method::Dense;
    else if (cfg.mode_method == "shift-invert") opt.method = DispersionOptions::Method::ShiftInvert;
    return opt;
}

std::optional<InterfaceMode> solve_reference_mode(const RunConfig& cfg,
                                                  const DielectricProfile& profile,
                                                  double omega,
                                                  ModeCandidate* candidate_out = nullptr) {
    const Grid1D grid = Grid1D::make(-cfg.mode_domain, cfg.mode_domain, cfg.mode_h1);
    auto candidates = solve_dispersion(profile, omega, grid, cfg.n_candidates,
                                       dispersion_options(cfg));
    if (candidates.empty()) return std::nullopt;
    if (candidate_out) *candidate_out = candidates.front();
    return reconstruct_mode(candidates.front().w3, profile, omega, candidates.front().k0, grid);
}

SolverConfig solver_config(const RunConfig& cfg, double eps, double h) {
    SolverConfig sc;
    sc.eps = eps;
    sc.h = h;
    sc.tol = cfg.tol;
    sc.max_iter = cfg.max_iter;
    sc.theta = cfg.theta;
    sc.eps3_scale = cfg.eps3_scale;
    sc.bounds_minus = Rect{-cfg.domain_x, 0.0, -cfg.domain_y, cfg.domain_y};
    sc.bounds_plus = Rect{0.0, cfg.domain_x, -cfg.domain_y, cfg.domain_y};
    return sc;
}

void write_solve_log(const RunConfig& cfg, const TransmissionProblem& prob,
                     const SolverState& state, const std::vector<IterationRecord>& records,
                     double eps, double h) {
    char name[96];
    std::snprintf(name, sizeof name, "solve_eps%.6g_h%.6g.jsonl", eps, h);
    std::ofstream out(out_path(cfg, name));
    for (const IterationRecord& r : records) {
        json line = {{"n", r.n}, {"residual", r.residual}, {"wall_time", r.wall_time}};
        out << line.dump() << '\n';
    }
    const EstimateAudit audit = prob.estimate_audit(state, /*with_ansatz_norms=*/false);
    json final_record = {{"norm_grad_phi_L2", prob.grad_phi_l2(state.phi)},
                         {"div_D_norm", prob.div_D_norm(state.phi)},
                         {"energy_J_phi", audit.energy_J_phi},
                         {"energy_J_0", audit.energy_J_0},
                         {"jump_flux", audit.jump_flux},
                         {"converged", state.converged}};
    out << final_record.dump() << '\n';
}

} // namespace

int run_dispersion(const RunConfig& cfg) {
    const DielectricProfile profile = cfg.make_profile();
    CsvWriter csv(out_path(cfg, "dispersion.csv"), {"omega", "k0", "boundary_ratio", "residual_L"});

    bool any = false;
    bool mode_written = false;
    for (double omega : cfg.omega_list) {
        ModeCandidate cand;
        const auto mode = solve_reference_mode(cfg, profile, omega, &cand);
        if (!mode) {
            std::fprintf(stderr, "dispersion: no localized mode for omega = %g\n", omega);
            continue;
        }
        any = true;
        const ModeReport report = verify_mode(*mode, profile);
        csv.row({omega, mode->k0, cand.boundary_ratio, report.residual_L});
        std::printf("omega = %g  k0 = %.6f  boundary_ratio = %.3g\n", omega, mode->k0,
                    cand.boundary_ratio);

        if (mode_written) continue;
        mode_written = true;
        CsvWriter mode_csv(out_path(cfg, "mode.csv"), {"x1", "eps1_w1", "w2_imag", "w3"});
        const int n = mode->grid.n_points();
        std::vector<double> xs(n), e1w1(n), w2(n), w3(n), ae(n), a2(n), a3(n);
        for (int i = 0; i < n; ++i) {
            xs[i] = mode->grid.point(i);
            e1w1[i] = profile.eps1(xs[i]) * mode->w1[i];
            w2[i] = mode->w2_imag[i];
            w3[i] = mode->w3[i];
            mode_csv.row({xs[i], e1w1[i], w2[i], w3[i]});
            ae[i] = std::fabs(e1w1[i]);
            a2[i] = std::fabs(w2[i]);
            a3[i] = std::fabs(w3[i]);
        }
        SvgPlot plot("TM interface mode (omega = " + format_double(omega) + ")", "x1", "component");
        plot.add_series("eps1*w1", xs, e1w1);
        plot.add_series("w2/i", xs, w2);
        plot.add_series("w3", xs, w3);
        plot.write(out_path(cfg, "mode.svg"));

        SvgPlot decay("Mode decay", "x1", "|component|");
        decay.set_logy(true);
        decay.add_series("|eps1*w1|", xs, ae);
        decay.add_series("|w2|", xs, a2);
        decay.add_series("|w3|", xs, a3);
        decay.write(out_path(cfg, "mode_decay.svg"));
    }
    if (!any) {
        std::fprintf(stderr, "dispersion: no localized mode found for any omega; for "
                             "piecewise-constant positive permittivity none exists\n");
        return kExitNoMode;
    }
    return kExitOk;
}

int run_eps_sweep(const RunConfig& cfg) {
    const DielectricProfile profile = cfg.make_profile();
    const auto mode = solve_reference_mode(cfg, profile, cfg.omega_list.front());
    if (!mode) return kExitNoMode;
    const Envelope envelope = cfg.make_envelope();

    CsvWriter csv(out_path(cfg, "eps_sweep.csv"), {"eps", "norm_grad_phi_L2", "converged"});
    std::vector<double> eps_ok, grad_ok;
    int failures = 0;
    for (double eps : cfg.eps_list) {
        TransmissionProblem prob(*mode, profile, envelope, solver_config(cfg, eps, cfg.h));
        std::vector<IterationRecord> records;
        const SolverState state = prob.solve(&records);
        const double grad = prob.grad_phi_l2(state.phi);
        csv.row({eps, grad, state.converged ? 1.0 : 0.0});
        write_solve_log(cfg, prob, state, records, eps, cfg.h);
        if (state.converged) {
            eps_ok.push_back(eps);
            grad_ok.push_back(grad);
        } else {
            ++failures;
            std::fprintf(stderr, "eps-sweep: solve at eps = %g did not converge\n", eps);
        }
        if (cfg.verbose)
            std::printf("eps = %g  |grad phi|_2 = %.6g  iters = %d\n", eps, grad,
                        static_cast<int>(state.residual_history.size()));
    }

    if (eps_ok.size() >= 4) {
        const double slope = fit_loglog_slope(eps_ok, grad_ok);
        csv.row({std::string("slope"), format_double(slope), std::string()});
        std::printf("eps-sweep slope = %.4f\n", slope);
    }
    SvgPlot plot("|grad phi|_2 against eps", "eps", "|grad phi|_2");
    plot.set_logx(true);
    plot.set_logy(true);
    plot.add_series("measured", eps_ok, grad_ok, true);
    plot.write(out_path(cfg, "eps_sweep.svg"));

    if (failures * 4 > static_cast<int>(cfg.eps_list.size()))
        return kExitPartialConvergence;
    return kExitOk;
}

int run_h_sweep(const RunConfig& cfg) {
    const DielectricProfile profile = cfg.make_profile();
    const auto mode = solve_reference_mode(cfg, profile, cfg.omega_list.front());
    if (!mode) return kExitNoMode;
    const Envelope envelope = cfg.make_envelope();

    CsvWriter csv(out_path(cfg, "h_sweep.csv"), {"h", "div_D_norm", "converged"});
    std::vector<double> hs, divs;
    int failures = 0;
    for (double h : cfg.h_list) {
        TransmissionProblem prob(*mode, profile, envelope, solver_config(cfg, cfg.eps, h));
        std::vector<IterationRecord> records;
        const SolverState state = prob.solve(&records);
        const double div = prob.div_D_norm(state.phi);
        csv.row({h, div, state.converged ? 1.0 : 0.0});
        write_solve_log(cfg, prob, state, records, cfg.eps, h);
        if (state.converged) {
            hs.push_back(h);
            divs.push_back(div);
        } else {
            ++failures;
        }
        if (cfg.verbose) std::printf("h = %g  |div D| = %.6g\n", h, div);
    }
    bool monotone = hs.size() >= 2;
    for (size_t i = 0; i + 1 < hs.size(); ++i) {
        const bool h_decreases = hs[i] > hs[i + 1];
        if ((h_decreases && divs[i + 1] >= divs[i]) || (!h_decreases && divs[i] >= divs[i + 1]))
            monotone = false;
    }
    csv.row({std::string("monotone_decreasing"), monotone ? "1" : "0", std::string()});
    std::printf("h-sweep monotone decrease: %s\n", monotone ? "yes" : "no");

    SvgPlot plot("|div D| surrogate against h", "h", "|div D|");
    plot.set_logx(true);
    plot.set_logy(true);
    plot.add_series("measured", hs, divs, true);
    plot.write(out_path(cfg, "h_sweep.svg"));

    if (failures * 4 > static_cast<int>(cfg.h_list.size())) return kExitPartialConvergence;
    return kExitOk;
}

int run_residual_trace(const RunConfig& cfg) {
    const DielectricProfile profile = cfg.make_profile();
    const auto mode = solve_reference_mode(cfg, profile, cfg.omega_list.front());
    if (!mode) return kExitNoMode;

    TransmissionProblem prob(*mode, profile, cfg.make_envelope(),
                             solver_config(cfg, cfg.eps, cfg.h));
    std::vector<IterationRecord> records;
    const SolverState state = prob.solve(&records);
    write_solve_log(cfg, prob, state, records, cfg.eps, cfg.h);

    CsvWriter csv(out_path(cfg, "residual_trace.csv"), {"n", "residual"});
    std::vector<double> ns, rs;
    for (size_t i = 0; i < state.residual_history.size(); ++i) {
        csv.row({static_cast<double>(i + 1), state.residual_history[i]});
        ns.push_back(static_cast<double>(i + 1));
        rs.push_back(state.residual_history[i]);
    }
    SvgPlot plot("Fixed-point residual", "iteration", "residual");
    plot.set_logy(true);
    plot.add_series("residual", ns, rs, true);
    plot.write(out_path(cfg, "residual_trace.svg"));
    std::printf("residual trace: %zu entries, converged = %s\n", rs.size(),
                state.converged ? "true" : "false");
    return kExitOk;
}

int run_audit(const RunConfig& cfg) {
    const DielectricProfile profile = cfg.make_profile();
    const auto mode = solve_reference_mode(cfg, profile, cfg.omega_list.front());
    if (!mode) return kExitNoMode;
    const Envelope envelope = cfg.make_envelope();

    struct Check {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Check> checks;
    auto add_check = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({name, pass, detail});
    };
    json report;

    // Ansatz norm scalings across the eps sweep.
    {
        CsvWriter csv(out_path(cfg, "ansatz_norms.csv"),
                      {"eps", "U0_L2", "U0_L4", "b_L2", "b_L1log"});
        std::vector<double> es, l2, l4, b2, blog;
        for (double eps : cfg.ansatz_eps_list) {
            const AnsatzField field(*mode, profile, envelope, eps);
            const NormReport n = field.norms();
            csv.row({eps, n.U0_L2, n.U0_L4, n.b_L2, n.b_L1log});
            es.push_back(eps);
            l2.push_back(n.U0_L2);
            l4.push_back(n.U0_L4);
            b2.push_back(n.b_L2);
            blog.push_back(n.b_L1log);
        }
        if (es.size() >= 4) {
            const double s2 = fit_loglog_slope(es, l2);
            const double s4 = fit_loglog_slope(es, l4);
            const double sb = fit_loglog_slope(es, b2);
            const double sl = fit_loglog_slope(es, blog);
            csv.row({std::string("slopes"), format_double(s2), format_double(s4),
                     format_double(sb), format_double(sl)});
            add_check("U0_L2 slope 0.5 +- 0.05", std::fabs(s2 - 0.5) <= 0.05, format_double(s2));
            add_check("U0_L4 slope 0.75 +- 0.05", std::fabs(s4 - 0.75) <= 0.05, format_double(s4));
            add_check("b_L2 slope 1.5 +- 0.05", std::fabs(sb - 1.5) <= 0.05, format_double(sb));
            report["ansatz_slopes"] = {{"U0_L2", s2}, {"U0_L4", s4}, {"b_L2", sb}, {"b_L1log", sl}};
            double ratio_max = 0.0;
            for (size_t i = 0; i < es.size(); ++i)
                ratio_max = std::max(ratio_max, blog[i] / std::pow(es[i], 0.75));
            add_check("b_L1log / eps^0.75 bounded over the sweep (max <= 1.0)", ratio_max <= 1.0,
                      "max ratio = " + format_double(ratio_max) +
                          ", fitted slope = " + format_double(sl));
            report["b_L1log_over_eps075_max"] = ratio_max;
        }
    }

    // Reference solve and the transmission-solver invariants.
    {
        TransmissionProblem prob(*mode, profile, envelope, solver_config(cfg, cfg.eps, cfg.h));
        const SolverState state = prob.solve();
        const EstimateAudit audit = prob.estimate_audit(state);
        report["estimate_audit"] = {{"lhs_22", audit.lhs_22},
                                    {"U0_L4_pow4", audit.U0_L4_pow4},
                                    {"b_L2_sq", audit.b_L2_sq},
                                    {"b_L1log_sq", audit.b_L1log_sq},
                                    {"ratio", audit.ratio},
                                    {"energy_J_phi", audit.energy_J_phi},
                                    {"energy_J_0", audit.energy_J_0},
                                    {"jump_tangential", audit.jump_tangential},
                                    {"jump_flux", audit.jump_flux}};
        add_check("reference solve converged", state.converged,
                  "iterations = " + std::to_string(state.residual_history.size()));
        bool decreasing = true;
        for (size_t i = 0; i + 1 < state.residual_history.size(); ++i)
            if (state.residual_history[i + 1] >= state.residual_history[i]) decreasing = false;
        add_check("residual strictly decreasing over recorded trace", decreasing, "");
        add_check("energy descent J(phi) < J(0)", audit.energy_J_phi < audit.energy_J_0,
                  format_double(audit.energy_J_phi) + " < " + format_double(audit.energy_J_0));
        add_check("tangential jump <= 1e-10", audit.jump_tangential <= 1e-10,
                  format_double(audit.jump_tangential));
    }

    // Linear limit: with eps3 = 0 one step solves the problem.
    {
        SolverConfig sc = solver_config(cfg, cfg.eps, cfg.h);
        sc.eps3_scale = 0.0;
        TransmissionProblem prob(*mode, profile, envelope, sc);
        const SolverState one = prob.fixed_point_step(prob.initial_state());
        const SolverState full = prob.solve();
        const double scale = std::max(one.phi.plus.cwiseAbs().maxCoeff(),
                                      one.phi.minus.cwiseAbs().maxCoeff());
        const double diff = std::max((one.phi.plus - full.phi.plus).cwiseAbs().maxCoeff(),
                                     (one.phi.minus - full.phi.minus).cwiseAbs().maxCoeff());
        const double rel = scale > 0 ? diff / scale : 0.0;
        add_check("linear limit: one-shot agreement <= 1e-10", rel <= 1e-10, format_double(rel));
        report["linear_limit_rel_diff"] = rel;
    }

    // Zero data: everything vanishes identically.
    {
        TransmissionProblem prob(*mode, profile, Envelope::zero(),
                                 solver_config(cfg, cfg.eps, cfg.h));
        const SolverState state = prob.solve();
        const bool zero = state.converged && state.residual_history.front() == 0.0 &&
                          prob.grad_phi_l2(state.phi) == 0.0 &&
                          prob.div_D_norm(state.phi) == 0.0;
        add_check("zero data: phi = 0, residuals and norms exactly 0", zero, "");
    }

    // Estimate (2.7) ratio across the eps sweep.
    {
        std::vector<double> ratios;
        for (double eps : cfg.eps_list) {
            TransmissionProblem prob(*mode, profile, envelope, solver_config(cfg, eps, cfg.h));
            const SolverState state = prob.solve();
            if (!state.converged) continue;
            const EstimateAudit audit = prob.estimate_audit(state);
            if (std::isfinite(audit.ratio)) ratios.push_back(audit.ratio);
        }
        double rmax = 0.0;
        for (double r : ratios) rmax = std::max(rmax, r);
        add_check("estimate ratio bounded across sweep (max <= 10)", !ratios.empty() && rmax <= 10.0,
                  "max ratio = " + format_double(rmax));
        report["estimate_ratio_max"] = rmax;
    }

    bool all_pass = true;
    json jchecks = json::array();
    for (const Check& c : checks) {
        all_pass = all_pass && c.pass;
        jchecks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        std::printf("%s  %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.empty() ? "" : ": ", c.detail.c_str());
    }
    report["checks"] = jchecks;
    report["all_pass"] = all_pass;
    std::ofstream(out_path(cfg, "audit.json")) << report.dump(2) << '\n';
    return all_pass ? kExitOk : kExitAuditFailure;
}

int run_experiment(const RunConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    std::ofstream(out_path(cfg, "config_echo.ini")) << cfg.echo();

    if (cfg.experiment == "dispersion") return run_dispersion(cfg);
    if (cfg.experiment == "eps-sweep") return run_eps_sweep(cfg);
    if (cfg.experiment == "h-sweep") return run_h_sweep(cfg);
    if (cfg.experiment == "residual-trace") return run_residual_trace(cfg);
    return run_audit(cfg);
}

} // namespace kerrdiv
