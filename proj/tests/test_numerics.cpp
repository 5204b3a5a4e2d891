#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smrac/numerics.hpp"

using namespace smrac;

namespace {

Matrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = dist(rng);
    return m;
}

// Gershgorin shift makes every eigenvalue real part <= -delta.
Matrix random_hurwitz(std::mt19937& rng, std::size_t n, double delta = 0.5) {
    Matrix a = random_matrix(rng, n, n, 2.0);
    for (std::size_t r = 0; r < n; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < n; ++c)
            if (c != r) row_sum += std::abs(a(r, c));
        a(r, r) = -std::abs(a(r, r)) - row_sum - delta;
    }
    return a;
}

} // namespace

TEST_CASE("lyapunov_solve on the reference system") {
    const Matrix a{{0.0, 1.0}, {-3.0, -4.0}};
    const Matrix p = lyapunov_solve(a, Matrix::identity(2));
    CHECK(p(0, 0) == doctest::Approx(7.0 / 6.0).epsilon(1e-12));
    CHECK(p(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(p(1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(p(1, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

    const Matrix residual = a.transpose() * p + p * a + Matrix::identity(2);
    CHECK(residual.frobenius_norm() <= 1e-10);
}

TEST_CASE("lyapunov_solve trivial and error cases") {
    const Matrix p = lyapunov_solve((-1.0) * Matrix::identity(2), Matrix::identity(2));
    CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p(0, 1) == doctest::Approx(0.0).epsilon(1e-14));

    CHECK_THROWS_AS(lyapunov_solve(Matrix::identity(2), Matrix::identity(2)), NotHurwitz);
    // eigenvalues +-i: the Kronecker system is singular
    CHECK_THROWS_AS(lyapunov_solve(Matrix{{0.0, 1.0}, {-1.0, 0.0}}, Matrix::identity(2)),
                    NotHurwitz);
}

TEST_CASE("lyapunov solutions are PD for random Hurwitz matrices") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const Matrix a = random_hurwitz(rng, n);
        const Matrix p = lyapunov_solve(a, Matrix::identity(n));
        CHECK(min_eig_sym(p) > 0.0);
        CHECK((a.transpose() * p + p * a + Matrix::identity(n)).frobenius_norm() <= 1e-10);
    }
}

TEST_CASE("is_hurwitz") {
    CHECK(is_hurwitz(Matrix{{0.0, 1.0}, {-3.0, -4.0}}));
    CHECK_FALSE(is_hurwitz(Matrix::identity(3)));
    CHECK_FALSE(is_hurwitz(Matrix{{0.0, 1.0}, {-1.0, 0.0}}));
}

TEST_CASE("pinv_left examples") {
    const Matrix unit{{0.0}, {1.0}};
    const Matrix p1 = pinv_left(unit);
    CHECK(p1(0, 0) == 0.0);
    CHECK(p1(0, 1) == 1.0);

    const Matrix p2 = pinv_left(Matrix::identity(3));
    CHECK((p2 - Matrix::identity(3)).frobenius_norm() <= 1e-14);

    const Matrix p3 = pinv_left(Matrix{{1.0}, {1.0}});
    CHECK(p3(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p3(0, 1) == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(pinv_left(Matrix{{0.0}, {0.0}}), RankDeficient);
    CHECK_THROWS_AS(pinv_left(Matrix{{1.0, 1.0}, {1.0, 1.0}}), RankDeficient);
}

TEST_CASE("pinv_left(B) * B = I for random full-column-rank B") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        const std::size_t m = 1 + static_cast<std::size_t>(trial) % n;
        Matrix b = random_matrix(rng, n, m);
        for (std::size_t j = 0; j < m; ++j) b(j, j) += 3.0; // keep it well conditioned
        const Matrix prod = pinv_left(b) * b;
        CHECK((prod - Matrix::identity(m)).frobenius_norm() <= 1e-12);
    }
}

TEST_CASE("kron examples") {
    const Matrix row{{1.0, 2.0}};
    const Matrix k1 = kron(Matrix::identity(1), row);
    CHECK(k1.rows() == 1);
    CHECK(k1.cols() == 2);
    CHECK(k1(0, 1) == 2.0);

    const Matrix k2 = kron(Matrix::identity(2), row);
    CHECK(k2.rows() == 2);
    CHECK(k2.cols() == 4);
    CHECK(k2(0, 0) == 1.0);
    CHECK(k2(0, 1) == 2.0);
    CHECK(k2(0, 2) == 0.0);
    CHECK(k2(1, 2) == 1.0);
    CHECK(k2(1, 3) == 2.0);

    const Matrix k3 = kron(Matrix{{1.0}, {2.0}}, Matrix{{3.0}});
    CHECK(k3.rows() == 2);
    CHECK(k3(1, 0) == 6.0);
}

TEST_CASE("kron block structure for random shapes") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    for (int trial = 0; trial < 25; ++trial) {
        const Matrix a = random_matrix(rng, dim(rng), dim(rng));
        const Matrix b = random_matrix(rng, dim(rng), dim(rng));
        const Matrix k = kron(a, b);
        REQUIRE(k.rows() == a.rows() * b.rows());
        REQUIRE(k.cols() == a.cols() * b.cols());
        for (std::size_t r = 0; r < k.rows(); ++r)
            for (std::size_t c = 0; c < k.cols(); ++c) {
                const double expected =
                    a(r / b.rows(), c / b.cols()) * b(r % b.rows(), c % b.cols());
                CHECK(k(r, c) == doctest::Approx(expected).epsilon(1e-15));
            }
    }
}

TEST_CASE("min_eig_sym examples") {
    CHECK(min_eig_sym(Matrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(min_eig_sym(Matrix(2, 2)) == doctest::Approx(0.0));
    CHECK(min_eig_sym(Matrix{{0.5, 0.0}, {0.0, 3.0}}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(min_eig_sym(Matrix(2, 3)), DimensionMismatch);
}

TEST_CASE("jacobi eigenvalues match a rotated diagonal") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> angle(0.0, 6.28);
    std::uniform_real_distribution<double> eig(0.1, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 3);
        std::vector<double> d(n);
        Matrix diag(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = eig(rng);
            diag(i, i) = d[i];
        }
        std::sort(d.begin(), d.end());

        Matrix q = Matrix::identity(n);
        for (std::size_t p = 0; p + 1 < n; ++p) {
            const double th = angle(rng);
            Matrix g = Matrix::identity(n);
            g(p, p) = std::cos(th);
            g(p + 1, p + 1) = std::cos(th);
            g(p, p + 1) = -std::sin(th);
            g(p + 1, p) = std::sin(th);
            q = q * g;
        }
        const Matrix m = q * diag * q.transpose();
        const auto eigs = sym_eigenvalues(m);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(eigs[i] == doctest::Approx(d[i]).epsilon(1e-10));
    }
}

TEST_CASE("rk4_step examples") {
    const Vector y0{1.0, 2.0};
    const Vector same =
        rk4_step([](double, const Vector& y) { return Vector(y.dim()); }, 0.0, y0, 0.1);
    CHECK(same[0] == 1.0);
    CHECK(same[1] == 2.0);

    const Vector decay =
        rk4_step([](double, const Vector& y) { return (-1.0) * y; }, 0.0, Vector{1.0}, 0.1);
    CHECK(decay[0] == doctest::Approx(0.9048375).epsilon(1e-7));

    const Vector ramp = rk4_step([](double, const Vector& y) { return Vector(y.dim(), 1.0); },
                                 0.0, Vector{0.0}, 0.01);
    CHECK(ramp[0] == 0.01);

    CHECK_THROWS_AS(
        rk4_step([](double, const Vector& y) { return Vector(y.dim(), 1.0 / 0.0); }, 0.0,
                 Vector{1.0}, 0.1),
        NumericalBlowup);
}

TEST_CASE("rk4 global convergence order on y' = -y") {
    auto integrate = [](double h) {
        Vector y{1.0};
        const int steps = static_cast<int>(std::llround(1.0 / h));
        for (int k = 0; k < steps; ++k)
            y = rk4_step([](double, const Vector& v) { return (-1.0) * v; }, h * k, y, h);
        return std::abs(y[0] - std::exp(-1.0));
    };
    const double e1 = integrate(0.1);
    const double e2 = integrate(0.05);
    const double e3 = integrate(0.025);
    CHECK(std::log2(e1 / e2) >= 3.9);
    CHECK(std::log2(e2 / e3) >= 3.9);
}

TEST_CASE("solve_linear and vec round out the kernel") {
    const Matrix a{{2.0, 1.0}, {1.0, 3.0}};
    const Matrix x = solve_linear(a, Matrix::identity(2));
    CHECK((a * x - Matrix::identity(2)).frobenius_norm() <= 1e-13);
    CHECK_THROWS_AS(solve_linear(Matrix(2, 2), Matrix::identity(2)), SingularMatrix);

    const Matrix k{{1.0, 3.0}, {2.0, 4.0}};
    const Vector v = vec(k);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 2.0);
    CHECK(v[2] == 3.0);
    CHECK(v[3] == 4.0);
}
