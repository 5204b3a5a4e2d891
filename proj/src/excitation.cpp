#include "smrac/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace smrac {

GramianState::GramianState(std::size_t mn, double k_s_) : Q(mn, mn), G(mn), k_s(k_s_) {}

GramianMemoryStack::GramianMemoryStack(std::size_t subsystems, std::size_t mn)
    : Q(subsystems, Matrix(mn, mn)), G(subsystems, Vector(mn)) {}

GramianDerivatives gramian_derivatives(const GramianState& gs, const Matrix& Z_f,
                                       const Vector& u_ei) {
    GramianDerivatives d;
    d.d_Q = Z_f.transpose() * Z_f - gs.k_s * gs.Q;
    d.d_G = Z_f.transpose() * u_ei - gs.k_s * gs.G;
    return d;
}

void gramian_save(const GramianState& gs, GramianMemoryStack& stack, int outgoing_id) {
    const std::size_t slot = static_cast<std::size_t>(outgoing_id - 1);
    stack.Q[slot] = gs.Q;
    stack.G[slot] = gs.G;
}

void gramian_load(GramianState& gs, const GramianMemoryStack& stack, int incoming_id) {
    const std::size_t slot = static_cast<std::size_t>(incoming_id - 1);
    gs.Q = stack.Q[slot];
    gs.G = stack.G[slot];
}

IIEState::IIEState(std::size_t subsystems, std::size_t mn, double epsilon, double fraction)
    : s(subsystems, 0),
      T(subsystems, std::numeric_limits<double>::quiet_NaN()),
      S_Qbar(subsystems, Matrix(mn, mn)),
      S_Gbar(subsystems, Vector(mn)),
      eta(subsystems, 0.0),
      epsilon_iie(epsilon),
      eta_fraction(fraction) {}

bool IIEState::all_detected() const {
    return std::all_of(s.begin(), s.end(), [](int f) { return f == 1; });
}

double IIEState::detection_horizon() const {
    double tf = 0.0;
    for (double ti : T) tf = std::max(tf, ti);
    return tf;
}

bool check_iie(const GramianState& gs, IIEState& iie, int active_id, double t, double t0,
               double k_sw_active) {
    const std::size_t slot = static_cast<std::size_t>(active_id - 1);
    if (iie.s[slot]) return false;
    const double lmin = min_eig_sym(gs.Q);
    if (!(lmin > iie.epsilon_iie)) return false; // strict inequality at the threshold
    iie.s[slot] = 1;
    iie.T[slot] = t - t0;
    iie.S_Qbar[slot] = gs.Q;
    iie.S_Gbar[slot] = gs.G;
    iie.eta[slot] = iie.eta_fraction * k_sw_active * lmin;
    return true;
}

GainCondition verify_gain_condition(const IIEState& iie, double k_swi, int id) {
    const std::size_t slot = static_cast<std::size_t>(id - 1);
    if (!iie.s[slot])
        throw NotYetExcited("gain condition: subsystem " + std::to_string(id) +
                            " has not reached IIE");
    GainCondition out;
    out.margin = k_swi * min_eig_sym(iie.S_Qbar[slot]) - iie.eta[slot];
    out.satisfied = out.margin >= 0.0;
    return out;
}

} // namespace smrac
