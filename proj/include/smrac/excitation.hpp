#pragma once

#include <vector>

#include "smrac/numerics.hpp"

namespace smrac {

/// Second-layer (Gramian) filters of the active subsystem.
struct GramianState {
    Matrix Q; // mn x mn, symmetric PSD
    Vector G; // mn
    double k_s = 1.0;

    GramianState() = default;
    GramianState(std::size_t mn, double k_s);
};

struct GramianMemoryStack {
    std::vector<Matrix> Q;
    std::vector<Vector> G;

    GramianMemoryStack() = default;
    GramianMemoryStack(std::size_t subsystems, std::size_t mn);
    std::size_t size() const { return Q.size(); }
};

struct GramianDerivatives {
    Matrix d_Q;
    Vector d_G;
};

GramianDerivatives gramian_derivatives(const GramianState& gs, const Matrix& Z_f,
                                       const Vector& u_ei);

void gramian_save(const GramianState& gs, GramianMemoryStack& stack, int outgoing_id);
void gramian_load(GramianState& gs, const GramianMemoryStack& stack, int incoming_id);

/// Per-subsystem IIE detection state. s_i flips to 1 permanently at the first
/// active-phase instant where lambda_min(Q) clears the threshold; Q and G are
/// frozen into S_Qbar / S_Gbar at that instant.
struct IIEState {
    std::vector<int> s;          // 0/1 flags
    std::vector<double> T;       // detection offset t - t0; NaN until detected
    std::vector<Matrix> S_Qbar;  // mn x mn snapshots
    std::vector<Vector> S_Gbar;  // mn snapshots
    std::vector<double> eta;     // convergence-rate parameters, set at detection
    double epsilon_iie = 1e-6;
    double eta_fraction = 0.9;   // eta_i = eta_fraction * k_swi * lambda_min(S_Qbar_i)

    IIEState() = default;
    IIEState(std::size_t subsystems, std::size_t mn, double epsilon_iie, double eta_fraction);

    bool all_detected() const;
    /// max_i T_i; requires all_detected().
    double detection_horizon() const;
};

/// Runs the detection test for the active subsystem at time t. k_sw_active
/// feeds the eta policy. Returns true when detection fired on this call.
bool check_iie(const GramianState& gs, IIEState& iie, int active_id, double t, double t0,
               double k_sw_active);

struct GainCondition {
    bool satisfied = false;
    double margin = 0.0; // k_swi * lambda_min(S_Qbar_i) - eta_i
};

/// Evaluates the convergence gain condition for subsystem i.
/// Throws NotYetExcited when s_i = 0.
GainCondition verify_gain_condition(const IIEState& iie, double k_swi, int id);

} // namespace smrac
