#include "smrac/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smrac {

int SwitchSchedule::active_at(double t) const {
    const auto it = std::upper_bound(instants.begin(), instants.end(), t);
    return ids[static_cast<std::size_t>(it - instants.begin())];
}

double SwitchSchedule::interval_start(double t) const {
    const auto it = std::upper_bound(instants.begin(), instants.end(), t);
    return it == instants.begin() ? t0 : *(it - 1);
}

void SwitchSchedule::validate(int num_subsystems) const {
    if (ids.size() != instants.size() + 1)
        throw ConfigError("schedule: ids must have one more entry than instants");
    double prev = t0;
    for (double tk : instants) {
        if (!(tk > prev))
            throw ConfigError("schedule: instants must be strictly increasing and > t0");
        prev = tk;
    }
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (ids[k] < 1 || ids[k] > num_subsystems)
            throw ConfigError("schedule: subsystem id out of range: " + std::to_string(ids[k]));
        if (k > 0 && ids[k] == ids[k - 1])
            throw ConfigError("schedule: consecutive intervals share the same subsystem");
    }
}

MatchedGains solve_matching(const SubsystemParams& sub, const ReferenceModel& ref) {
    const Matrix pinv_b = pinv_left(sub.B);
    MatchedGains g;
    g.K_x = (pinv_b * (ref.A_m - sub.A)).transpose();
    g.K_r = (pinv_b * ref.B_m).transpose();
    g.phi = vec(g.K_x);

    const double res_a = (sub.A + sub.B * g.K_x.transpose() - ref.A_m).frobenius_norm();
    const double res_b = (sub.B * g.K_r.transpose() - ref.B_m).frobenius_norm();
    if (res_a > 1e-9 || res_b > 1e-9)
        throw MatchingInfeasible("subsystem " + std::to_string(sub.index) +
                                 ": matching residual " + std::to_string(std::max(res_a, res_b)));
    return g;
}

Matrix regressor(const Vector& x, std::size_t m) {
    const std::size_t n = x.dim();
    Matrix z(m, m * n);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) z(j, j * n + i) = x[i];
    return z;
}

ControlDecomposition control_input(const Vector& x, const Vector& r,
                                   const Vector& phi_hat_active,
                                   const Matrix& K_r_active) {
    ControlDecomposition out;
    out.u_e = regressor(x, K_r_active.rows()) * phi_hat_active;
    out.u_k = K_r_active.transpose() * r;
    out.u = out.u_k + out.u_e;
    return out;
}

Vector plant_derivative(const SubsystemParams& sub, const Vector& x, const Vector& u) {
    return sub.A * x + sub.B * u;
}

Vector reference_derivative(const ReferenceModel& ref, const Vector& x_m, const Vector& r) {
    return ref.A_m * x_m + ref.B_m * r;
}

Vector tracking_error(const Vector& x, const Vector& x_m) {
    return x - x_m;
}

} // namespace smrac
