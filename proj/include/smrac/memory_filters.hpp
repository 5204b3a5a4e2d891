#pragma once

#include <vector>

#include "smrac/numerics.hpp"
#include "smrac/system_model.hpp"

namespace smrac {

/// First-layer filter states shared by the active subsystem, plus the
/// interval-start values cached at the last load for the algebraic e_df form.
struct FilterBank {
    Vector e_df; // n, algebraic (refreshed via edf_update, never integrated)
    Vector e_f;  // n
    Vector u_ef; // m
    Matrix Z_f;  // m x mn
    double k_f = 1.0;

    double last_load_time = 0.0;
    Vector e_at_load;   // e(t_k), live value at the load instant
    Vector ef_at_load;  // e_f(t_k), value just loaded from the stack
    Vector edf_at_load; // e_df(t_k), value just loaded from the stack

    FilterBank() = default;
    FilterBank(std::size_t n, std::size_t m, double k_f);
};

/// Per-subsystem snapshots of the first-layer filters taken at switch-out.
/// u_ei is stored alongside the raw filters; it is the inactive-phase
/// regression target that satisfies S_uei = S_Zf * phi exactly.
struct FilterMemoryStack {
    std::vector<Vector> e_df; // n each
    std::vector<Vector> e_f;  // n each
    std::vector<Vector> u_ef; // m each
    std::vector<Vector> u_ei; // m each
    std::vector<Matrix> Z_f;  // m x mn each

    FilterMemoryStack() = default;
    FilterMemoryStack(std::size_t subsystems, std::size_t n, std::size_t m);
    std::size_t size() const { return e_df.size(); }
};

struct FilterDerivatives {
    Vector d_e_f;
    Vector d_u_ef;
    Matrix d_Z_f;
};

/// First-order filter dynamics for e_f, u_ef, Z_f.
FilterDerivatives filter_derivatives(const FilterBank& bank, const Vector& e,
                                     const Vector& u_e, const Matrix& Z);

/// e_df at time t from current e, e_f and the cached interval-start values,
/// without differentiating e. Consistent with the filter ODE boundary
/// conditions: the interval-start terms decay with exp(-k_f (t - t_k)).
Vector edf_value(const FilterBank& bank, const Vector& e_now, const Vector& ef_now, double t);

/// edf_value evaluated at the bank's own e_f.
Vector edf_update(const FilterBank& bank, const Vector& e_now, double t);

struct DerivedSignals {
    Vector h;    // n,  e_df - A_m e_f
    Vector h_B;  // m,  pinv_left(B_i) h
    Vector u_ei; // m,  u_ef - h_B
};

/// Signals derived from the filter bank for the active subsystem.
DerivedSignals derived_signals(const FilterBank& bank, const ReferenceModel& ref,
                               const Matrix& B_i);

/// Same computation on explicit filter values with a precomputed pseudo-inverse.
DerivedSignals derived_signals_raw(const Vector& e_df, const Vector& e_f, const Vector& u_ef,
                                   const Matrix& A_m, const Matrix& pinv_B);

/// Records the outgoing subsystem's pre-switch filter values (and u_ei) in its
/// stack slots. e_df_pre and u_ei_pre are the values at t_k^-.
void save_on_switch_out(const FilterBank& bank, const Vector& e_df_pre, const Vector& u_ei_pre,
                        FilterMemoryStack& stack, int outgoing_id);

/// Restores the incoming subsystem's stack slots into the bank and caches the
/// interval-start values for edf_update.
void load_on_switch_in(FilterBank& bank, const FilterMemoryStack& stack, int incoming_id,
                       const Vector& e_now, double t_k);

} // namespace smrac
