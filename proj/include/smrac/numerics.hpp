#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "smrac/errors.hpp"

namespace smrac {

/// Dense vector of doubles. Small fixed sizes (n, m, mn); value semantics.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double value = 0.0) : data_(dim, value) {}
    Vector(std::initializer_list<double> entries) : data_(entries) {}

    std::size_t dim() const { return data_.size(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    const std::vector<double>& data() const { return data_; }

    double norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }
    double max_abs() const {
        double s = 0.0;
        for (double v : data_) s = std::max(s, std::abs(v));
        return s;
    }
    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Vector& operator+=(const Vector& o);
    Vector& operator-=(const Vector& o);
    Vector& operator*=(double s);

private:
    std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);
Vector operator*(Vector a, double s);
double dot(const Vector& a, const Vector& b);

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}
    Matrix(std::initializer_list<std::initializer_list<double>> init);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<double>& data() const { return data_; }

    Matrix transpose() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(Matrix a, double s);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);

/// (M + M^T) / 2.
Matrix symmetrize(const Matrix& m);

/// Column-stacking vectorization, vec(K) in R^{rows*cols}.
Vector vec(const Matrix& k);

/// Kronecker product, dims (p*r) x (q*s).
Matrix kron(const Matrix& a, const Matrix& b);

/// Solves A X = B by Gaussian elimination with partial pivoting.
Matrix solve_linear(Matrix a, Matrix b);

/// Left pseudo-inverse (B^T B)^{-1} B^T of a full-column-rank matrix.
/// Throws RankDeficient when cond(B^T B) exceeds 1e12.
Matrix pinv_left(const Matrix& b);

/// Solves A^T P + P A = -Qm for symmetric PD P via Kronecker vectorization.
/// Throws NotHurwitz when the system is singular, the residual exceeds 1e-10,
/// or the solution is not positive definite.
Matrix lyapunov_solve(const Matrix& a, const Matrix& qm);

/// All eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> sym_eigenvalues(Matrix m);

/// Smallest eigenvalue of a symmetric matrix; symmetrizes the input first.
double min_eig_sym(const Matrix& m);

/// Largest eigenvalue of a symmetric matrix; symmetrizes the input first.
double max_eig_sym(const Matrix& m);

/// True iff all eigenvalues of A have real part < -margin, decided through the
/// Lyapunov PD test (see lyapunov_solve).
bool is_hurwitz(const Matrix& a, double margin = 1e-9);

/// One classical 4th-order Runge-Kutta step y(t) -> y(t+h).
/// Throws NumericalBlowup when a stage derivative turns non-finite.
template <typename F>
Vector rk4_step(F&& f, double t, const Vector& y, double h) {
    auto guard = [](const Vector& k) {
        if (!k.all_finite()) throw NumericalBlowup("rk4_step: non-finite derivative");
        return k;
    };
    const Vector k1 = guard(f(t, y));
    const Vector k2 = guard(f(t + 0.5 * h, y + 0.5 * h * k1));
    const Vector k3 = guard(f(t + 0.5 * h, y + 0.5 * h * k2));
    const Vector k4 = guard(f(t + h, y + h * k3));
    Vector out = y;
    for (std::size_t i = 0; i < out.dim(); ++i)
        out[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

} // namespace smrac
