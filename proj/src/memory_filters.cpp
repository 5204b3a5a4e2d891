#include "smrac/memory_filters.hpp"

#include <cmath>

namespace smrac {

FilterBank::FilterBank(std::size_t n, std::size_t m, double k_f_)
    : e_df(n), e_f(n), u_ef(m), Z_f(m, m * n), k_f(k_f_),
      e_at_load(n), ef_at_load(n), edf_at_load(n) {}

FilterMemoryStack::FilterMemoryStack(std::size_t subsystems, std::size_t n, std::size_t m)
    : e_df(subsystems, Vector(n)), e_f(subsystems, Vector(n)),
      u_ef(subsystems, Vector(m)), u_ei(subsystems, Vector(m)),
      Z_f(subsystems, Matrix(m, m * n)) {}

FilterDerivatives filter_derivatives(const FilterBank& bank, const Vector& e,
                                     const Vector& u_e, const Matrix& Z) {
    FilterDerivatives d;
    d.d_e_f = e - bank.k_f * bank.e_f;
    d.d_u_ef = u_e - bank.k_f * bank.u_ef;
    d.d_Z_f = Z - bank.k_f * bank.Z_f;
    return d;
}

Vector edf_value(const FilterBank& bank, const Vector& e_now, const Vector& ef_now, double t) {
    const double beta = std::exp(-bank.k_f * (t - bank.last_load_time));
    return beta * bank.edf_at_load + e_now - beta * bank.e_at_load -
           bank.k_f * (ef_now - beta * bank.ef_at_load);
}

Vector edf_update(const FilterBank& bank, const Vector& e_now, double t) {
    return edf_value(bank, e_now, bank.e_f, t);
}

DerivedSignals derived_signals(const FilterBank& bank, const ReferenceModel& ref,
                               const Matrix& B_i) {
    return derived_signals_raw(bank.e_df, bank.e_f, bank.u_ef, ref.A_m, pinv_left(B_i));
}

DerivedSignals derived_signals_raw(const Vector& e_df, const Vector& e_f, const Vector& u_ef,
                                   const Matrix& A_m, const Matrix& pinv_B) {
    DerivedSignals out;
    out.h = e_df - A_m * e_f;
    out.h_B = pinv_B * out.h;
    out.u_ei = u_ef - out.h_B;
    return out;
}

void save_on_switch_out(const FilterBank& bank, const Vector& e_df_pre, const Vector& u_ei_pre,
                        FilterMemoryStack& stack, int outgoing_id) {
    const std::size_t slot = static_cast<std::size_t>(outgoing_id - 1);
    stack.e_df[slot] = e_df_pre;
    stack.e_f[slot] = bank.e_f;
    stack.u_ef[slot] = bank.u_ef;
    stack.u_ei[slot] = u_ei_pre;
    stack.Z_f[slot] = bank.Z_f;
}

void load_on_switch_in(FilterBank& bank, const FilterMemoryStack& stack, int incoming_id,
                       const Vector& e_now, double t_k) {
    const std::size_t slot = static_cast<std::size_t>(incoming_id - 1);
    bank.e_df = stack.e_df[slot];
    bank.e_f = stack.e_f[slot];
    bank.u_ef = stack.u_ef[slot];
    bank.Z_f = stack.Z_f[slot];
    bank.last_load_time = t_k;
    bank.e_at_load = e_now;
    bank.ef_at_load = bank.e_f;
    bank.edf_at_load = bank.e_df;
}

} // namespace smrac
