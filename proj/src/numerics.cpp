#include "smrac/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace smrac {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw DimensionMismatch(msg);
}

} // namespace

Vector& Vector::operator+=(const Vector& o) {
    require(dim() == o.dim(), "vector add: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Vector& Vector::operator-=(const Vector& o) {
    require(dim() == o.dim(), "vector sub: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Vector& Vector::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector a) { return a *= s; }
Vector operator*(Vector a, double s) { return a *= s; }

double dot(const Vector& a, const Vector& b) {
    require(a.dim() == b.dim(), "dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        require(row.size() == cols_, "matrix init: ragged rows");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double s = 0.0;
    for (double v : data_) s = std::max(s, std::abs(v));
    return s;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    require(rows_ == o.rows_ && cols_ == o.cols_, "matrix add: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    require(rows_ == o.rows_ && cols_ == o.cols_, "matrix sub: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul: dimension mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double av = a(r, k);
            if (av == 0.0) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += av * b(k, c);
        }
    return out;
}

Vector operator*(const Matrix& a, const Vector& x) {
    require(a.cols() == x.dim(), "matvec: dimension mismatch");
    Vector out(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * x[c];
        out[r] = s;
    }
    return out;
}

Matrix symmetrize(const Matrix& m) {
    require(m.square(), "symmetrize: non-square input");
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = 0.5 * (m(r, c) + m(c, r));
    return out;
}

Vector vec(const Matrix& k) {
    Vector out(k.rows() * k.cols());
    std::size_t idx = 0;
    for (std::size_t c = 0; c < k.cols(); ++c)
        for (std::size_t r = 0; r < k.rows(); ++r) out[idx++] = k(r, c);
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const double av = a(ar, ac);
            if (av == 0.0) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = av * b(br, bc);
        }
    return out;
}

Matrix solve_linear(Matrix a, Matrix b) {
    require(a.square(), "solve_linear: non-square system");
    require(a.rows() == b.rows(), "solve_linear: rhs dimension mismatch");
    const std::size_t n = a.rows();
    const double pivot_floor = 1e-13 * std::max(a.max_abs(), 1e-300);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) { best = v; pivot = r; }
        }
        if (best <= pivot_floor) throw SingularMatrix("solve_linear: singular system");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
            for (std::size_t c = 0; c < b.cols(); ++c) std::swap(b(col, c), b(pivot, c));
        }
        const double inv = 1.0 / a(col, col);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a(r, col) * inv;
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
            for (std::size_t c = 0; c < b.cols(); ++c) b(r, c) -= factor * b(col, c);
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        const double inv = 1.0 / a(r, r);
        for (std::size_t c = 0; c < b.cols(); ++c) b(r, c) *= inv;
    }
    return b;
}

Matrix pinv_left(const Matrix& b) {
    const Matrix bt = b.transpose();
    const Matrix gram = bt * b;
    const auto eigs = sym_eigenvalues(gram);
    const double lmin = eigs.front(), lmax = eigs.back();
    if (lmin <= 0.0 || lmax > 1e12 * lmin)
        throw RankDeficient("pinv_left: B is rank deficient");
    return solve_linear(gram, bt);
}

Matrix lyapunov_solve(const Matrix& a, const Matrix& qm) {
    require(a.square() && qm.square() && a.rows() == qm.rows(),
            "lyapunov_solve: dimension mismatch");
    const std::size_t n = a.rows();
    const Matrix at = a.transpose();
    const Matrix id = Matrix::identity(n);
    // vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P)
    const Matrix system = kron(id, at) + kron(at, id);

    Matrix rhs(n * n, 1);
    const Vector neg_q = vec((-1.0) * qm);
    for (std::size_t i = 0; i < n * n; ++i) rhs(i, 0) = neg_q[i];

    Matrix sol(n, n);
    try {
        const Matrix x = solve_linear(system, rhs);
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t r = 0; r < n; ++r) sol(r, c) = x(c * n + r, 0);
    } catch (const SingularMatrix&) {
        throw NotHurwitz("lyapunov_solve: singular Kronecker system (A not Hurwitz)");
    }
    sol = symmetrize(sol);

    const Matrix residual = at * sol + sol * a + qm;
    if (residual.frobenius_norm() > 1e-10)
        throw NotHurwitz("lyapunov_solve: residual exceeds 1e-10");
    if (min_eig_sym(sol) <= 0.0)
        throw NotHurwitz("lyapunov_solve: solution not positive definite (A not Hurwitz)");
    return sol;
}

std::vector<double> sym_eigenvalues(Matrix m) {
    if (!m.square()) throw DimensionMismatch("sym_eigenvalues: non-square input");
    m = symmetrize(m);
    const std::size_t n = m.rows();
    const double tol = 1e-12 * std::max(m.frobenius_norm(), 1e-300);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r + 1; c < n; ++c) s += m(r, c) * m(r, c);
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> eigs(n);
    for (std::size_t i = 0; i < n; ++i) eigs[i] = m(i, i);
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

double min_eig_sym(const Matrix& m) {
    return sym_eigenvalues(m).front();
}

double max_eig_sym(const Matrix& m) {
    return sym_eigenvalues(m).back();
}

bool is_hurwitz(const Matrix& a, double margin) {
    Matrix p(0, 0);
    try {
        p = lyapunov_solve(a, Matrix::identity(a.rows()));
    } catch (const NotHurwitz&) {
        return false;
    }
    // max Re(lambda) <= -1/(2 lambda_max(P)), so a bounded P certifies the margin.
    return max_eig_sym(p) <= 1.0 / (2.0 * margin);
}

} // namespace smrac
