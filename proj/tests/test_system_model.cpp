#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "smrac/system_model.hpp"
#include "test_support.hpp"

using namespace smrac;

TEST_CASE("solve_matching recovers the true gains of the default scenario") {
    const SimulationConfig cfg = testing::default_config();
    const std::vector<std::vector<double>> expected = {
        {2.0, 2.0}, {2.5, 2.5}, {3.0, 3.0}, {5.0, 5.0}};
    for (std::size_t i = 0; i < cfg.subsystems.size(); ++i) {
        const MatchedGains g = solve_matching(cfg.subsystems[i], cfg.ref);
        CHECK(g.K_x(0, 0) == doctest::Approx(expected[i][0]).epsilon(1e-12));
        CHECK(g.K_x(1, 0) == doctest::Approx(expected[i][1]).epsilon(1e-12));
        CHECK(g.K_r(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

        const double res_a =
            (cfg.subsystems[i].A + cfg.subsystems[i].B * g.K_x.transpose() - cfg.ref.A_m)
                .frobenius_norm();
        const double res_b =
            (cfg.subsystems[i].B * g.K_r.transpose() - cfg.ref.B_m).frobenius_norm();
        CHECK(res_a <= 1e-9);
        CHECK(res_b <= 1e-9);
        CHECK(g.phi[0] == g.K_x(0, 0));
        CHECK(g.phi[1] == g.K_x(1, 0));
    }
}

TEST_CASE("solve_matching trivial and infeasible cases") {
    const ReferenceModel ref{Matrix{{0.0, 1.0}, {-3.0, -4.0}}, Matrix{{0.0}, {1.0}}};

    SubsystemParams matched;
    matched.index = 1;
    matched.A = ref.A_m;
    matched.B = ref.B_m;
    const MatchedGains g = solve_matching(matched, ref);
    CHECK(g.K_x.frobenius_norm() <= 1e-12);
    CHECK((g.K_r - Matrix::identity(1)).frobenius_norm() <= 1e-12);

    SubsystemParams bad;
    bad.index = 2;
    bad.A = Matrix{{0.0, 0.0}, {-5.0, -6.0}}; // mismatch outside the span of B
    bad.B = ref.B_m;
    CHECK_THROWS_AS(solve_matching(bad, ref), MatchingInfeasible);
}

TEST_CASE("regressor block structure") {
    const Matrix z1 = regressor(Vector{1.0, 2.0}, 1);
    CHECK(z1.rows() == 1);
    CHECK(z1.cols() == 2);
    CHECK(z1(0, 0) == 1.0);
    CHECK(z1(0, 1) == 2.0);

    const Matrix z2 = regressor(Vector{1.0, 2.0}, 2);
    CHECK(z2.rows() == 2);
    CHECK(z2.cols() == 4);
    CHECK(z2(0, 0) == 1.0);
    CHECK(z2(0, 1) == 2.0);
    CHECK(z2(0, 2) == 0.0);
    CHECK(z2(1, 2) == 1.0);
    CHECK(z2(1, 3) == 2.0);
}

TEST_CASE("Z(x) vec(K) = K' x for random K, x") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    std::uniform_int_distribution<std::size_t> dims(1, 4);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = dims(rng), m = dims(rng);
        Matrix k(n, m);
        Vector x(n);
        for (std::size_t r = 0; r < n; ++r) {
            x[r] = dist(rng);
            for (std::size_t c = 0; c < m; ++c) k(r, c) = dist(rng);
        }
        const Vector lhs = regressor(x, m) * vec(k);
        const Vector rhs = k.transpose() * x;
        CHECK((lhs - rhs).norm() <= 1e-12);
    }
}

TEST_CASE("control_input decomposition") {
    const Matrix kr = Matrix::identity(1);
    const ControlDecomposition zero =
        control_input(Vector{1.0, 2.0}, Vector{0.0}, Vector{0.0, 0.0}, kr);
    CHECK(zero.u[0] == 0.0);

    const ControlDecomposition four =
        control_input(Vector{1.0, 2.0}, Vector{0.0}, Vector{2.0, 2.0}, kr);
    CHECK(four.u_e[0] == doctest::Approx(6.0));
    CHECK(four.u[0] == doctest::Approx(6.0));

    // Z phi_hat agrees with K_hat' x when phi_hat = vec(K_hat).
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    Matrix k_hat(2, 1);
    k_hat(0, 0) = dist(rng);
    k_hat(1, 0) = dist(rng);
    const Vector x{dist(rng), dist(rng)};
    const ControlDecomposition dec = control_input(x, Vector{1.5}, vec(k_hat), kr);
    const Vector direct = k_hat.transpose() * x + kr.transpose() * Vector{1.5};
    CHECK((dec.u - direct).norm() <= 1e-15);
}

TEST_CASE("plant and reference derivatives") {
    SubsystemParams sub;
    sub.index = 1;
    sub.A = Matrix{{0.0, 1.0}, {-5.0, -6.0}};
    sub.B = Matrix{{0.0}, {1.0}};

    CHECK(plant_derivative(sub, Vector{0.0, 0.0}, Vector{0.0}).norm() == 0.0);
    const Vector d = plant_derivative(sub, Vector{1.0, 0.0}, Vector{0.0});
    CHECK(d[0] == 0.0);
    CHECK(d[1] == -5.0);

    SubsystemParams ident;
    ident.index = 1;
    ident.A = Matrix::identity(2);
    ident.B = Matrix{{0.0}, {1.0}};
    const Vector d2 = plant_derivative(ident, Vector{1.0, 1.0}, Vector{0.0});
    CHECK(d2[0] == 1.0);
    CHECK(d2[1] == 1.0);

    const ReferenceModel ref{Matrix{{0.0, 1.0}, {-3.0, -4.0}}, Matrix{{0.0}, {1.0}}};
    CHECK(reference_derivative(ref, Vector{0.0, 0.0}, Vector{0.0}).norm() == 0.0);
    const Vector dm = reference_derivative(ref, Vector{1.0, 0.0}, Vector{0.0});
    CHECK(dm[0] == 0.0);
    CHECK(dm[1] == -3.0);
}

TEST_CASE("homogeneous reference decays to zero") {
    const ReferenceModel ref{Matrix{{0.0, 1.0}, {-3.0, -4.0}}, Matrix{{0.0}, {1.0}}};
    Vector xm{1.0, 1.0};
    const double h = 1e-2;
    for (int k = 0; k < 800; ++k)
        xm = rk4_step([&](double, const Vector& y) { return reference_derivative(ref, y, Vector{0.0}); },
                      h * k, xm, h);
    CHECK(xm.norm() <= 1e-3);
}

TEST_CASE("tracking_error") {
    CHECK(tracking_error(Vector{1.0, 2.0}, Vector{1.0, 2.0}).norm() == 0.0);
    const Vector e = tracking_error(Vector{1.0, 2.0}, Vector{0.0, 1.0});
    CHECK(e[0] == 1.0);
    CHECK(e[1] == 1.0);
    const Vector anti = tracking_error(Vector{0.0, 1.0}, Vector{1.0, 2.0});
    CHECK((e + anti).norm() == 0.0);
}

TEST_CASE("switch schedule semantics") {
    SwitchSchedule sch;
    sch.t0 = 0.0;
    sch.instants = {1.0, 2.0};
    sch.ids = {1, 2, 3};
    sch.validate(3);

    CHECK(sch.active_at(0.0) == 1);
    CHECK(sch.active_at(0.999) == 1);
    CHECK(sch.active_at(1.0) == 2); // right-continuous
    CHECK(sch.active_at(1.5) == 2);
    CHECK(sch.active_at(2.0) == 3);
    CHECK(sch.interval_start(0.5) == 0.0);
    CHECK(sch.interval_start(1.0) == 1.0);
    CHECK(sch.interval_start(2.7) == 2.0);

    SwitchSchedule repeated = sch;
    repeated.ids = {1, 1, 2};
    CHECK_THROWS_AS(repeated.validate(3), ConfigError);

    SwitchSchedule out_of_range = sch;
    out_of_range.ids = {1, 2, 9};
    CHECK_THROWS_AS(out_of_range.validate(3), ConfigError);

    SwitchSchedule decreasing = sch;
    decreasing.instants = {2.0, 1.0};
    CHECK_THROWS_AS(decreasing.validate(3), ConfigError);
}

TEST_CASE("exact matching keeps the tracking error at integrator tolerance") {
    // phi_hat0 = phi_i for every subsystem and e(t0) = 0: the closed loop is
    // the reference dynamics, so e stays at integration noise across switches.
    SimulationConfig cfg = testing::default_config(10.0, 2.5);
    cfg.x0 = Vector{0.3, -0.2};
    cfg.xm0 = cfg.x0;
    for (const auto& sub : cfg.subsystems)
        cfg.phi_hat0.push_back(solve_matching(sub, cfg.ref).phi);

    const RunResult run = run_scenario(cfg);
    double worst = 0.0;
    for (const auto& rec : run.trace) worst = std::max(worst, rec.e_norm);
    CHECK(worst <= 1e-6);
}
