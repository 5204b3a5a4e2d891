#pragma once

#include <cstdint>
#include <vector>

#include "smrac/estimator.hpp"
#include "smrac/excitation.hpp"
#include "smrac/memory_filters.hpp"
#include "smrac/numerics.hpp"
#include "smrac/system_model.hpp"

namespace smrac {

/// Excitation injection r(t) = rbar + delta(t - t_s), where the decaying
/// multisine delta restarts its clock at every switching instant.
struct SignalSpec {
    Vector rbar;                               // m; zero by default
    double delta_amplitude = 10.0;
    double delta_decay = 0.1;
    std::vector<double> delta_frequencies = {2.0, 3.0, 4.0, 5.0, 6.0};
};

Vector reference_input(double t, const SwitchSchedule& schedule, const SignalSpec& spec,
                       std::size_t m);

struct SimulationConfig {
    std::vector<SubsystemParams> subsystems;
    ReferenceModel ref;
    SwitchSchedule schedule;

    double k_f = 1.0;
    double k_s = 1.0;
    std::vector<double> k_l, k_ll, k_sw; // per subsystem; sized M by the loader
    std::vector<double> gamma_scale;     // Gamma_i = gamma_scale[i] * I
    double eta_fraction = 0.9;

    Vector x0, xm0;
    std::vector<Vector> phi_hat0; // per subsystem, mn each

    double step_h = 1e-3;
    double t_end = 240.0;
    SignalSpec signal;
    double epsilon_iie = 1e-6;
    EstimatorMode mode = EstimatorMode::memory;
    InactiveTarget inactive_target = InactiveTarget::u_ei;
    int trace_decimate = 1;

    std::size_t state_dim() const { return subsystems.empty() ? 0 : subsystems[0].A.rows(); }
    std::size_t input_dim() const { return subsystems.empty() ? 0 : subsystems[0].B.cols(); }
    std::size_t num_subsystems() const { return subsystems.size(); }
};

struct TraceRecord {
    double t = 0.0;
    int sigma = 0;
    Vector x, x_m, e, u;
    std::vector<Vector> phi_hat;  // per subsystem
    std::vector<double> phi_err;  // ||phi_tilde_i||
    std::vector<int> s;           // IIE flags
    double e_norm = 0.0;
    double lmin_Q = 0.0;
    double V = 0.0;
    double xi_norm = 0.0;
};

struct RunSummary {
    std::vector<double> T_i;            // detection offsets, NaN if undetected
    std::vector<int> s_final;
    std::vector<double> gamma_i;        // lambda_min(S_Qbar_i), NaN if undetected
    std::vector<double> eta_i;
    std::vector<double> gain_margin;    // NaN if undetected
    double T_f = 0.0;                   // NaN unless all detected
    double final_e_norm = 0.0;
    std::vector<double> final_phi_err;
    double max_uei_residual = 0.0;      // max_t ||u_ei - Z_f phi_sigma||
    double max_gramian_residual = 0.0;  // max_t ||G - Q phi_sigma||
    double min_lmin_Q = 0.0;
    double max_switch_V_jump = 0.0;     // max_k |V(t_k^+) - V(t_k^-)|
    double max_logged_norm = 0.0;
    std::vector<double> lambda_mZ_i;    // lambda_min(S_Zf_i' S_Zf_i) at t_end
    std::vector<double> lambda_mQ_i;    // lambda_min(S_Q_i) at t_end
    double runtime_seconds = 0.0;
    std::uint64_t steps = 0;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
};

/// Drives the coupled ODE system on a fixed grid, applying the switch-instant
/// protocol (save outgoing, swap sigma, load incoming) and the per-step IIE
/// check. One engine per run; not shared across threads.
class SimulationEngine {
public:
    explicit SimulationEngine(SimulationConfig config);

    /// Advances one grid step; handles a scheduled switch at the landing time.
    void advance();
    bool done() const;
    /// Runs to t_end and returns the trace and summary.
    RunResult run();

    double time() const { return t_; }
    int active() const { return active_; }
    const SimulationConfig& config() const { return cfg_; }
    const FilterBank& filter_bank() const { return bank_; }
    const FilterMemoryStack& filter_stack() const { return fstack_; }
    const GramianState& gramian() const { return gram_; }
    const GramianMemoryStack& gramian_stack() const { return gstack_; }
    const IIEState& iie() const { return iie_; }
    const EstimatorState& estimator() const { return est_; }
    const Matrix& lyapunov_P() const { return P_; }
    const std::vector<MatchedGains>& matched_gains() const { return gains_; }

    /// Validates the config and throws ConfigError / NotHurwitz /
    /// MatchingInfeasible / RankDeficient on the first violation.
    static void validate_config(const SimulationConfig& cfg);

private:
    Vector pack() const;
    void unpack(const Vector& y);
    Vector derivative(double t, const Vector& y) const;
    void handle_switch(double t_k, int outgoing, int incoming);
    void post_step(std::uint64_t step_index);
    void record(std::uint64_t step_index);
    TraceRecord make_record() const;
    double lyapunov_v() const;

    SimulationConfig cfg_;
    std::size_t n_ = 0, m_ = 0, mn_ = 0, M_ = 0;
    std::uint64_t total_steps_ = 0, step_ = 0;
    double t_ = 0.0;
    int active_ = 1;
    std::size_t next_switch_ = 0; // index into schedule.instants

    Vector x_, xm_;
    FilterBank bank_;
    GramianState gram_;
    EstimatorState est_;
    FilterMemoryStack fstack_;
    GramianMemoryStack gstack_;
    IIEState iie_;

    Matrix P_;                        // lyapunov_solve(A_m, I)
    std::vector<Matrix> pinv_B_;      // per subsystem
    std::vector<Matrix> gamma_inv_;   // per subsystem
    std::vector<MatchedGains> gains_; // diagnostics only

    std::vector<TraceRecord> trace_;
    RunSummary summary_;
};

/// Fills defaulted fields in place: broadcasts scalar gain lists to M entries
/// and zero-initializes missing x0/xm0/phi_hat0/rbar.
void normalize_config(SimulationConfig& cfg);

/// Full simulation from t0 to t_end.
RunResult run_scenario(const SimulationConfig& config);

} // namespace smrac
