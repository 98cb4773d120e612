#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "dstbc/errors.hpp"

namespace dstbc {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// Dense row-major complex matrix. Everything in this library is at most
// 2R x 2R with R <= 8, so there are no blocked or sparse paths; values are
// cheap to copy and freely movable between threads.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    // Entries given row-major; rejects size mismatch and non-finite values.
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(const CVector& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    const std::vector<Complex>& entries() const { return e_; }
    CVector column(std::size_t j) const;

    bool is_diagonal(double tol = 0.0) const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Complex> e_;
};

CMatrix matmul(const CMatrix& a, const CMatrix& b);
CVector matvec(const CMatrix& a, const CVector& x);
CMatrix conj_transpose(const CMatrix& a);

// Determinant via LU with partial pivoting.
Complex determinant(CMatrix a);

// Solve a*x = y for Hermitian positive-definite a (Cholesky). Throws
// SingularityError when the factorization meets a non-positive pivot.
CVector solve_hermitian(const CMatrix& a, const CVector& y);

// Lower Cholesky factor of a Hermitian positive-definite matrix; only the
// lower triangle of the input is read.
CMatrix cholesky_lower(const CMatrix& a);
CVector cholesky_solve(const CMatrix& lower, const CVector& y);

CMatrix hadamard_product(const CMatrix& a, const CMatrix& b);

// Numerical rank: pivots of a fully pivoted elimination are counted while
// larger than tol times the largest pivot. tol must be positive.
std::size_t rank(CMatrix a, double tol = 1e-9);

CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, const CMatrix& a);

// max |a_ij|
double max_abs(const CMatrix& a);

double vector_norm(const CVector& v);
// a^H b
Complex inner(const CVector& a, const CVector& b);

} // namespace dstbc
