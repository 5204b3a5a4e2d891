#pragma once

#include <vector>

#include "smrac/numerics.hpp"

namespace smrac {

/// One plant of the switched family. A is unknown to the controller side and
/// is only ever read by the simulator and by diagnostics.
struct SubsystemParams {
    int index = 0; // 1-based id
    Matrix A;      // n x n
    Matrix B;      // n x m, full column rank
};

/// Common reference model shared by all subsystems; A_m must be Hurwitz.
struct ReferenceModel {
    Matrix A_m; // n x n
    Matrix B_m; // n x m
};

/// True controller parameters satisfying the matching equations.
struct MatchedGains {
    Matrix K_x; // n x m
    Matrix K_r; // m x m
    Vector phi; // mn, = vec(K_x)
};

/// Piecewise-constant, right-continuous switching signal.
/// ids[0] is active on [t0, instants[0]); ids[k] on [instants[k-1], instants[k]).
struct SwitchSchedule {
    double t0 = 0.0;
    std::vector<double> instants;
    std::vector<int> ids;

    int active_at(double t) const;
    /// Start of the interval containing t (t0 or the latest instant <= t).
    double interval_start(double t) const;
    /// Throws ConfigError on non-increasing instants, out-of-range or repeated
    /// consecutive ids, or size mismatch. num_subsystems is M.
    void validate(int num_subsystems) const;
};

/// Solves the matching equations A_i + B_i K_x^T = A_m, B_i K_r^T = B_m.
/// Throws MatchingInfeasible when a residual exceeds 1e-9.
MatchedGains solve_matching(const SubsystemParams& sub, const ReferenceModel& ref);

/// Regressor Z = I_m kron x^T, satisfying Z vec(K) = K^T x.
Matrix regressor(const Vector& x, std::size_t m);

struct ControlDecomposition {
    Vector u;   // total input
    Vector u_k; // feedforward K_r^T r
    Vector u_e; // adaptive part Z phi_hat
};

/// Certainty-equivalence control for the active subsystem.
ControlDecomposition control_input(const Vector& x, const Vector& r,
                                   const Vector& phi_hat_active,
                                   const Matrix& K_r_active);

Vector plant_derivative(const SubsystemParams& sub, const Vector& x, const Vector& u);
Vector reference_derivative(const ReferenceModel& ref, const Vector& x_m, const Vector& r);
Vector tracking_error(const Vector& x, const Vector& x_m);

} // namespace smrac
