#pragma once

#include <vector>

#include "smrac/excitation.hpp"
#include "smrac/memory_filters.hpp"
#include "smrac/numerics.hpp"

namespace smrac {

enum class EstimatorMode { memory, baseline };

/// Regression target used by the inactive-phase filtered term. u_ei is the
/// stored target consistent with the memory prediction error; e_df reproduces
/// the literal stored-filter form and requires m == n.
enum class InactiveTarget { u_ei, e_df };

/// All M estimators run simultaneously: one on the active branch, the rest on
/// the inactive branch driven by their memory stacks.
struct EstimatorState {
    std::vector<Vector> phi_hat; // mn each
    std::vector<Matrix> Gamma;   // mn x mn PD learning gains
    std::vector<double> k_l, k_ll, k_sw;
    EstimatorMode mode = EstimatorMode::memory;
    InactiveTarget inactive_target = InactiveTarget::u_ei;
};

struct AdaptationTerms {
    Vector C_e;      // tracking-error term (active branch only)
    Vector C_li;     // filtered prediction-error term (active)
    Vector C_lli;    // Gramian term (active)
    Vector C_swi;    // frozen-snapshot term, zero until s_i = 1
    Vector Cbar_li;  // stored filtered term (inactive)
    Vector Cbar_lli; // stored Gramian term (inactive)
    Vector prediction_error;        // eps_i = Z_f phi_hat - u_ei
    Vector memory_prediction_error; // S_eps_i = S_Zf phi_hat - target
};

/// Active-branch terms for subsystem i from live signals. The tracking-error
/// term enters as C_e = -Z^T B_i^T P^T e so that it cancels the error-dynamics
/// cross term in the Lyapunov rate.
AdaptationTerms adaptation_terms_active(const EstimatorState& est, int id, const Matrix& Z,
                                        const Vector& e, const Matrix& P, const Matrix& B_i,
                                        const Matrix& Z_f, const Vector& u_ei, const Matrix& Q,
                                        const Vector& G, const IIEState& iie);

/// Inactive-branch terms for subsystem i from its memory stacks.
AdaptationTerms adaptation_terms_inactive(const EstimatorState& est, int id,
                                          const FilterMemoryStack& fstack,
                                          const GramianMemoryStack& gstack,
                                          const IIEState& iie);

/// phi_hat_i derivative: Gamma_i times the branch sum.
Vector estimate_derivative(const EstimatorState& est, int id, const AdaptationTerms& terms,
                           bool active_branch);

/// Memoryless comparison law: Gamma_i C_e while active, zero while inactive.
Vector baseline_estimate_derivative(const EstimatorState& est, int id, bool active,
                                    const AdaptationTerms& active_terms);

} // namespace smrac
