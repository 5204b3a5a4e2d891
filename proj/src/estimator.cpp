#include "smrac/estimator.hpp"

namespace smrac {

namespace {

Vector snapshot_term(const EstimatorState& est, const IIEState& iie, std::size_t slot,
                     const Vector& phi_hat) {
    if (!iie.s[slot]) return Vector(phi_hat.dim());
    return est.k_sw[slot] * (iie.S_Gbar[slot] - iie.S_Qbar[slot] * phi_hat);
}

} // namespace

AdaptationTerms adaptation_terms_active(const EstimatorState& est, int id, const Matrix& Z,
                                        const Vector& e, const Matrix& P, const Matrix& B_i,
                                        const Matrix& Z_f, const Vector& u_ei, const Matrix& Q,
                                        const Vector& G, const IIEState& iie) {
    const std::size_t slot = static_cast<std::size_t>(id - 1);
    const Vector& phi_hat = est.phi_hat[slot];
    const std::size_t mn = phi_hat.dim();

    AdaptationTerms t;
    t.C_e = (-1.0) * (Z.transpose() * (B_i.transpose() * (P.transpose() * e)));
    t.prediction_error = Z_f * phi_hat - u_ei;
    t.C_li = (-est.k_l[slot]) * (Z_f.transpose() * t.prediction_error);
    t.C_lli = est.k_ll[slot] * (G - Q * phi_hat);
    t.C_swi = snapshot_term(est, iie, slot, phi_hat);
    t.Cbar_li = Vector(mn);
    t.Cbar_lli = Vector(mn);
    t.memory_prediction_error = Vector(t.prediction_error.dim());
    return t;
}

AdaptationTerms adaptation_terms_inactive(const EstimatorState& est, int id,
                                          const FilterMemoryStack& fstack,
                                          const GramianMemoryStack& gstack,
                                          const IIEState& iie) {
    const std::size_t slot = static_cast<std::size_t>(id - 1);
    const Vector& phi_hat = est.phi_hat[slot];
    const std::size_t mn = phi_hat.dim();
    const Matrix& s_zf = fstack.Z_f[slot];

    AdaptationTerms t;
    t.C_e = Vector(mn);
    t.C_li = Vector(mn);
    t.C_lli = Vector(mn);

    if (est.inactive_target == InactiveTarget::u_ei) {
        t.memory_prediction_error = s_zf * phi_hat - fstack.u_ei[slot];
    } else {
        // literal stored-filter target; only well-formed when m == n
        if (fstack.e_df[slot].dim() != s_zf.rows())
            throw DimensionMismatch("inactive_target=e_df requires m == n");
        t.memory_prediction_error = s_zf * phi_hat - fstack.e_df[slot];
    }
    t.Cbar_li = (-est.k_l[slot]) * (s_zf.transpose() * t.memory_prediction_error);
    t.Cbar_lli = est.k_ll[slot] * (gstack.G[slot] - gstack.Q[slot] * phi_hat);
    t.C_swi = snapshot_term(est, iie, slot, phi_hat);
    t.prediction_error = Vector(t.memory_prediction_error.dim());
    return t;
}

Vector estimate_derivative(const EstimatorState& est, int id, const AdaptationTerms& terms,
                           bool active_branch) {
    const std::size_t slot = static_cast<std::size_t>(id - 1);
    const Vector sum = active_branch ? terms.C_e + terms.C_li + terms.C_lli + terms.C_swi
                                     : terms.Cbar_li + terms.Cbar_lli + terms.C_swi;
    return est.Gamma[slot] * sum;
}

Vector baseline_estimate_derivative(const EstimatorState& est, int id, bool active,
                                    const AdaptationTerms& active_terms) {
    const std::size_t slot = static_cast<std::size_t>(id - 1);
    if (!active) return Vector(est.phi_hat[slot].dim());
    return est.Gamma[slot] * active_terms.C_e;
}

} // namespace smrac
