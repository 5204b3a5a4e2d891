#include "smrac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smrac {

namespace {

bool same(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim()) return false;
    for (std::size_t i = 0; i < a.dim(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

bool same(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return a.data() == b.data();
}

double trapezoid_ise(const std::vector<TraceRecord>& trace) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        const double f0 = trace[k].e_norm * trace[k].e_norm;
        const double f1 = trace[k + 1].e_norm * trace[k + 1].e_norm;
        acc += 0.5 * (f0 + f1) * (trace[k + 1].t - trace[k].t);
    }
    return acc;
}

} // namespace

LyapunovContext make_lyapunov_context(const ReferenceModel& ref, const Matrix& Q_m,
                                      const std::vector<Matrix>& Gamma) {
    LyapunovContext ctx;
    ctx.Q_m = Q_m;
    ctx.P = lyapunov_solve(ref.A_m, Q_m);
    ctx.lambda_m = min_eig_sym(ctx.P);
    ctx.lambda_M = max_eig_sym(ctx.P);
    for (const auto& g : Gamma) {
        const Matrix gi = solve_linear(g, Matrix::identity(g.rows()));
        ctx.Gamma_inv.push_back(gi);
        ctx.lambda_m = std::min(ctx.lambda_m, min_eig_sym(gi));
        ctx.lambda_M = std::max(ctx.lambda_M, max_eig_sym(gi));
    }
    return ctx;
}

double lyapunov_value(const Vector& e, const std::vector<Vector>& phi_tilde,
                      const LyapunovContext& ctx) {
    double v = 0.5 * dot(e, ctx.P * e);
    for (std::size_t i = 0; i < phi_tilde.size(); ++i)
        v += 0.5 * dot(phi_tilde[i], ctx.Gamma_inv[i] * phi_tilde[i]);
    return v;
}

DecayFit decay_fit(const std::vector<TraceRecord>& trace, double T_f,
                   const LyapunovContext& ctx) {
    DecayFit fit;
    fit.gamma1 = std::sqrt(ctx.lambda_M / ctx.lambda_m);
    if (trace.empty()) throw IIEIncomplete("decay_fit: empty trace");

    const double t0 = trace.front().t;
    const double t_start = t0 + T_f;
    std::size_t first = trace.size();
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (trace[k].t >= t_start - 1e-12) { first = k; break; }
    }
    if (first == trace.size()) throw IIEIncomplete("decay_fit: T_f beyond the trace horizon");
    for (int flag : trace[first].s)
        if (!flag) throw IIEIncomplete("decay_fit: some subsystems not excited by T_f");

    // Least squares on log ||xi||.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const std::size_t count = trace.size() - first;
    for (std::size_t k = first; k < trace.size(); ++k) {
        const double tau = trace[k].t - t_start;
        const double y = std::log(std::max(trace[k].xi_norm, 1e-300));
        sx += tau; sy += y; sxx += tau * tau; sxy += tau * y;
    }
    fit.xi_at_Tf = trace[first].xi_norm;
    if (count < 2) {
        fit.gamma2_hat = 0.0;
        fit.bound_ok = false;
        return fit;
    }
    const double denom = static_cast<double>(count) * sxx - sx * sx;
    const double slope = denom != 0.0 ? (static_cast<double>(count) * sxy - sx * sy) / denom : 0.0;
    fit.gamma2_hat = -slope;

    bool ok = fit.gamma2_hat > 1e-12; // non-decaying fits never certify the bound
    for (std::size_t k = first; ok && k < trace.size(); ++k) {
        const double tau = trace[k].t - t_start;
        const double envelope =
            fit.gamma1 * fit.xi_at_Tf * std::exp(-fit.gamma2_hat * tau) * (1.0 + 1e-6);
        if (trace[k].xi_norm > envelope) ok = false;
    }
    fit.bound_ok = ok;
    return fit;
}

double monotonicity_check(const std::vector<TraceRecord>& trace) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < trace.size(); ++k)
        worst = std::max(worst, trace[k + 1].V - trace[k].V);
    return trace.size() < 2 ? 0.0 : worst;
}

bool configs_match_except_mode(const SimulationConfig& a, const SimulationConfig& b) {
    if (a.subsystems.size() != b.subsystems.size()) return false;
    for (std::size_t i = 0; i < a.subsystems.size(); ++i) {
        if (a.subsystems[i].index != b.subsystems[i].index) return false;
        if (!same(a.subsystems[i].A, b.subsystems[i].A)) return false;
        if (!same(a.subsystems[i].B, b.subsystems[i].B)) return false;
    }
    if (!same(a.ref.A_m, b.ref.A_m) || !same(a.ref.B_m, b.ref.B_m)) return false;
    if (a.schedule.t0 != b.schedule.t0 || a.schedule.instants != b.schedule.instants ||
        a.schedule.ids != b.schedule.ids)
        return false;
    if (a.k_f != b.k_f || a.k_s != b.k_s || a.k_l != b.k_l || a.k_ll != b.k_ll ||
        a.k_sw != b.k_sw || a.gamma_scale != b.gamma_scale || a.eta_fraction != b.eta_fraction)
        return false;
    if (!same(a.x0, b.x0) || !same(a.xm0, b.xm0)) return false;
    if (a.phi_hat0.size() != b.phi_hat0.size()) return false;
    for (std::size_t i = 0; i < a.phi_hat0.size(); ++i)
        if (!same(a.phi_hat0[i], b.phi_hat0[i])) return false;
    if (a.step_h != b.step_h || a.t_end != b.t_end) return false;
    if (!same(a.signal.rbar, b.signal.rbar) ||
        a.signal.delta_amplitude != b.signal.delta_amplitude ||
        a.signal.delta_decay != b.signal.delta_decay ||
        a.signal.delta_frequencies != b.signal.delta_frequencies)
        return false;
    if (a.epsilon_iie != b.epsilon_iie || a.inactive_target != b.inactive_target ||
        a.trace_decimate != b.trace_decimate)
        return false;
    return true;
}

ComparisonSummary compare_runs(const RunResult& memory_run, const RunResult& baseline_run,
                               const SimulationConfig& cfg_memory,
                               const SimulationConfig& cfg_baseline) {
    if (!configs_match_except_mode(cfg_memory, cfg_baseline))
        throw ConfigMismatch("compare_runs: configurations differ beyond the estimator mode");
    if (memory_run.trace.size() != baseline_run.trace.size())
        throw ConfigMismatch("compare_runs: traces have different lengths");

    ComparisonSummary out;
    out.ise_memory = trapezoid_ise(memory_run.trace);
    out.ise_baseline = trapezoid_ise(baseline_run.trace);
    out.final_phi_err_memory = memory_run.summary.final_phi_err;
    out.final_phi_err_baseline = baseline_run.summary.final_phi_err;

    const std::size_t M = memory_run.summary.final_phi_err.size();
    out.max_phi_err_delta.assign(M, 0.0);
    for (std::size_t k = 0; k < memory_run.trace.size(); ++k)
        for (std::size_t i = 0; i < M; ++i)
            out.max_phi_err_delta[i] =
                std::max(out.max_phi_err_delta[i],
                         std::abs(memory_run.trace[k].phi_err[i] -
                                  baseline_run.trace[k].phi_err[i]));

    for (std::size_t i = 0; i < M; ++i) {
        out.final_phi_err_sum_memory += out.final_phi_err_memory[i];
        out.final_phi_err_sum_baseline += out.final_phi_err_baseline[i];
    }
    out.memory_no_worse = out.final_phi_err_sum_memory <= out.final_phi_err_sum_baseline;
    return out;
}

ConvergenceReport build_report(const RunResult& run, const SimulationConfig& cfg) {
    const std::size_t n = cfg.state_dim();
    const std::size_t mn = cfg.input_dim() * n;
    std::vector<Matrix> gammas;
    for (double g : cfg.gamma_scale) gammas.push_back(g * Matrix::identity(mn));
    const LyapunovContext ctx =
        make_lyapunov_context(cfg.ref, Matrix::identity(n), gammas);

    ConvergenceReport rep;
    const RunSummary& s = run.summary;
    rep.T_i = s.T_i;
    rep.s_i = s.s_final;
    rep.gamma_i = s.gamma_i;
    rep.eta_i = s.eta_i;
    rep.gain_margin = s.gain_margin;
    for (double mgn : s.gain_margin) rep.gain_ok.push_back(mgn >= 0.0);
    rep.T_f = s.T_f;
    rep.lambda_m = ctx.lambda_m;
    rep.lambda_M = ctx.lambda_M;
    rep.gamma1 = std::sqrt(ctx.lambda_M / ctx.lambda_m);
    rep.final_e_norm = s.final_e_norm;
    rep.final_phi_err = s.final_phi_err;
    rep.max_uei_residual = s.max_uei_residual;
    rep.max_gramian_residual = s.max_gramian_residual;
    rep.min_lmin_Q = s.min_lmin_Q;
    rep.runtime_seconds = s.runtime_seconds;

    rep.worst_V_increment = monotonicity_check(run.trace);
    double v_max = 0.0;
    bool sandwich = true;
    for (const auto& recd : run.trace) {
        v_max = std::max(v_max, recd.V);
        const double lo = 0.5 * ctx.lambda_m * recd.xi_norm * recd.xi_norm;
        const double hi = 0.5 * ctx.lambda_M * recd.xi_norm * recd.xi_norm;
        const double slack = 1e-9 * std::max(1.0, hi);
        if (recd.V < lo - slack || recd.V > hi + slack) sandwich = false;
    }
    rep.sandwich_ok = sandwich;
    rep.v_monotone_budget = 1e-7 * v_max;
    rep.v_monotone = rep.worst_V_increment <= rep.v_monotone_budget;

    if (!run.trace.empty()) rep.xi_final = run.trace.back().xi_norm;
    if (std::isfinite(s.T_f)) {
        const DecayFit fit = decay_fit(run.trace, s.T_f, ctx);
        rep.gamma2_hat = fit.gamma2_hat;
        rep.decay_bound_ok = fit.bound_ok;
        rep.xi_at_Tf = fit.xi_at_Tf;

        // Conservative proof-rate reference; generically 0 when m < mn because
        // lambda_min(S_Zf' S_Zf) vanishes for a thin stored regressor.
        double rho_a = std::numeric_limits<double>::infinity();
        double rho_i = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s.eta_i.size(); ++i) {
            rho_a = std::min(rho_a, 2.0 * s.eta_i[i]);
            rho_i = std::min(rho_i, 2.0 * std::min({s.lambda_mZ_i[i], s.lambda_mQ_i[i],
                                                    s.eta_i[i]}));
        }
        rep.alpha_reference =
            std::min({min_eig_sym(ctx.Q_m), rho_a, rho_i}) / ctx.lambda_M;
    } else {
        rep.gamma2_hat = std::numeric_limits<double>::quiet_NaN();
        rep.xi_at_Tf = std::numeric_limits<double>::quiet_NaN();
        rep.alpha_reference = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

} // namespace smrac
