#include "dstbc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dstbc {

namespace {

bool finite(const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

void require_shape(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

} // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), e_(rows * cols, Complex{0.0, 0.0}) {
    require_shape(rows >= 1 && cols >= 1, "matrix dimensions must be at least 1x1");
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), e_(std::move(entries)) {
    require_shape(rows >= 1 && cols >= 1, "matrix dimensions must be at least 1x1");
    if (e_.size() != rows * cols)
        throw DimensionError("entry count does not match rows*cols");
    for (const Complex& z : e_)
        if (!finite(z)) throw ConstructionError("non-finite matrix entry");
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(const CVector& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CVector CMatrix::column(std::size_t j) const {
    CVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

bool CMatrix::is_diagonal(double tol) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (i != j && std::abs((*this)(i, j)) > tol) return false;
    return true;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    require_shape(a.cols() == b.rows(), "matmul: inner dimensions differ");
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CVector matvec(const CMatrix& a, const CVector& x) {
    require_shape(a.cols() == x.size(), "matvec: dimensions differ");
    CVector y(a.rows(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

CMatrix conj_transpose(const CMatrix& a) {
    CMatrix h(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) h(j, i) = std::conj(a(i, j));
    return h;
}

Complex determinant(CMatrix a) {
    require_shape(a.rows() == a.cols(), "determinant: matrix must be square");
    const std::size_t n = a.rows();
    Complex det{1.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = std::abs(a(i, k));
            if (m > best) { best = m; piv = i; }
        }
        if (best == 0.0) return Complex{0.0, 0.0};
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

CMatrix cholesky_lower(const CMatrix& a) {
    require_shape(a.rows() == a.cols(), "cholesky: matrix must be square");
    const std::size_t n = a.rows();
    CMatrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            Complex s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            if (i == j) {
                const double d = s.real();
                if (!(d > 0.0) || !std::isfinite(d))
                    throw SingularityError("matrix is not positive definite");
                l(i, i) = std::sqrt(d);
            } else {
                l(i, j) = s / l(j, j).real();
            }
        }
    }
    return l;
}

CVector cholesky_solve(const CMatrix& lower, const CVector& y) {
    const std::size_t n = lower.rows();
    require_shape(y.size() == n, "cholesky_solve: size mismatch");
    CVector z(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex s = y[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * z[k];
        z[i] = s / lower(i, i).real();
    }
    CVector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Complex s = z[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(lower(k, ii)) * x[k];
        x[ii] = s / lower(ii, ii).real();
    }
    return x;
}

CVector solve_hermitian(const CMatrix& a, const CVector& y) {
    return cholesky_solve(cholesky_lower(a), y);
}

CMatrix hadamard_product(const CMatrix& a, const CMatrix& b) {
    require_shape(a.rows() == b.rows() && a.cols() == b.cols(),
                  "hadamard_product: shapes differ");
    CMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * b(i, j);
    return c;
}

std::size_t rank(CMatrix a, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("rank: tol must be positive");
    const std::size_t steps = std::min(a.rows(), a.cols());
    std::vector<double> pivots;
    pivots.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        std::size_t pr = s, pc = s;
        double best = 0.0;
        for (std::size_t i = s; i < a.rows(); ++i)
            for (std::size_t j = s; j < a.cols(); ++j) {
                const double m = std::abs(a(i, j));
                if (m > best) { best = m; pr = i; pc = j; }
            }
        if (best == 0.0) break;
        if (pr != s)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(s, j), a(pr, j));
        if (pc != s)
            for (std::size_t i = 0; i < a.rows(); ++i) std::swap(a(i, s), a(i, pc));
        pivots.push_back(best);
        for (std::size_t i = s + 1; i < a.rows(); ++i) {
            const Complex f = a(i, s) / a(s, s);
            for (std::size_t j = s; j < a.cols(); ++j) a(i, j) -= f * a(s, j);
        }
    }
    if (pivots.empty()) return 0;
    const double cutoff = tol * pivots.front();
    std::size_t r = 0;
    for (double p : pivots)
        if (p > cutoff) ++r;
    return r;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "matrix add: shapes differ");
    CMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sub: shapes differ");
    CMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

CMatrix operator*(Complex s, const CMatrix& a) {
    CMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
    return c;
}

double max_abs(const CMatrix& a) {
    double m = 0.0;
    for (const Complex& z : a.entries()) m = std::max(m, std::abs(z));
    return m;
}

double vector_norm(const CVector& v) {
    double s = 0.0;
    for (const Complex& z : v) s += std::norm(z);
    return std::sqrt(s);
}

Complex inner(const CVector& a, const CVector& b) {
    require_shape(a.size() == b.size(), "inner: lengths differ");
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

} // namespace dstbc
