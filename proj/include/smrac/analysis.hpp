#pragma once

#include <vector>

#include "smrac/engine.hpp"
#include "smrac/numerics.hpp"

namespace smrac {

/// Quantities of the common Lyapunov function V = e'Pe/2 + sum phi~'Gi^-1 phi~/2.
struct LyapunovContext {
    Matrix P;   // n x n PD
    Matrix Q_m; // n x n PD
    std::vector<Matrix> Gamma_inv;
    double lambda_m = 0.0; // min over lmin(P), lmin(Gamma_i^-1)
    double lambda_M = 0.0; // max over lmax(P), lmax(Gamma_i^-1)
};

LyapunovContext make_lyapunov_context(const ReferenceModel& ref, const Matrix& Q_m,
                                      const std::vector<Matrix>& Gamma);

double lyapunov_value(const Vector& e, const std::vector<Vector>& phi_tilde,
                      const LyapunovContext& ctx);

struct DecayFit {
    double gamma2_hat = 0.0; // fitted exponential rate of ||xi||
    double gamma1 = 0.0;     // sqrt(lambda_M / lambda_m)
    double xi_at_Tf = 0.0;
    bool bound_ok = false;   // pointwise exponential envelope holds and rate > 0
};

/// Least-squares slope of log ||xi|| on [t0+T_f, t_end].
/// Throws IIEIncomplete when some s_i = 0 at T_f.
DecayFit decay_fit(const std::vector<TraceRecord>& trace, double T_f,
                   const LyapunovContext& ctx);

/// Worst positive increment of V over consecutive trace records (can be
/// negative when V is strictly decreasing throughout).
double monotonicity_check(const std::vector<TraceRecord>& trace);

struct ComparisonSummary {
    double ise_memory = 0.0;   // integral of ||e||^2, trapezoid
    double ise_baseline = 0.0;
    double final_phi_err_sum_memory = 0.0;
    double final_phi_err_sum_baseline = 0.0;
    std::vector<double> final_phi_err_memory;
    std::vector<double> final_phi_err_baseline;
    std::vector<double> max_phi_err_delta; // per subsystem, max_t |memory - baseline|
    bool memory_no_worse = false;          // final sum ||phi~|| memory <= baseline
};

/// Compares a memory-mode run against a baseline run of the same scenario.
/// Throws ConfigMismatch when the configs differ beyond the estimator mode.
ComparisonSummary compare_runs(const RunResult& memory_run, const RunResult& baseline_run,
                               const SimulationConfig& cfg_memory,
                               const SimulationConfig& cfg_baseline);

/// Convergence and stability diagnostics for one completed run.
struct ConvergenceReport {
    std::vector<double> T_i;
    std::vector<int> s_i;
    std::vector<double> gamma_i;     // lambda_min(S_Qbar_i)
    std::vector<double> eta_i;
    std::vector<double> gain_margin;
    std::vector<bool> gain_ok;
    double T_f = 0.0;
    double lambda_m = 0.0, lambda_M = 0.0;
    double gamma1 = 0.0;
    double gamma2_hat = 0.0;
    bool decay_bound_ok = false;
    double xi_at_Tf = 0.0, xi_final = 0.0;
    double alpha_reference = 0.0;    // conservative rate from the proof constants
    double worst_V_increment = 0.0;
    double v_monotone_budget = 0.0;  // 1e-7 * max V
    bool v_monotone = false;
    bool sandwich_ok = false;        // lm/2 ||xi||^2 <= V <= lM/2 ||xi||^2 pointwise
    double final_e_norm = 0.0;
    std::vector<double> final_phi_err;
    double max_uei_residual = 0.0, max_gramian_residual = 0.0;
    double min_lmin_Q = 0.0;
    double runtime_seconds = 0.0;
};

ConvergenceReport build_report(const RunResult& run, const SimulationConfig& cfg);

/// True when the two configs agree on every field except the estimator mode.
bool configs_match_except_mode(const SimulationConfig& a, const SimulationConfig& b);

} // namespace smrac
