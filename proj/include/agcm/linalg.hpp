#pragma once

#include <Eigen/Dense>

#include "agcm/errors.hpp"

namespace agcm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Singular values at or below max(rows, cols) * s_max * machine epsilon count as zero.
double rank_cutoff(Index rows, Index cols, double largest_singular_value);

Index numerical_rank(const Matrix& A);

// Orthogonal projection onto the column space of X.
// X must have full column rank; the result is symmetric and idempotent.
Matrix projector(const Matrix& X);

// Moore-Penrose pseudoinverse via SVD. Defined for any shape and rank.
Matrix pinv(const Matrix& A);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Only the lower triangle of the input is read. A nonpositive pivot aborts the
// factorization and reports its index.
class SpdFactor {
public:
    explicit SpdFactor(const Matrix& A);

    Index dimension() const { return lower_.rows(); }
    const Matrix& lower() const { return lower_; }

    // X such that A X = B.
    Matrix solve(const Matrix& B) const;

private:
    Matrix lower_;
};

// A X = B for symmetric positive definite A.
Matrix spd_solve(const Matrix& A, const Matrix& B);

// Kronecker product: block (i, j) equals A(i, j) * B.
Matrix kron(const Matrix& A, const Matrix& B);

// Row-stacking vec: the rows of A laid out one after another.
// With this convention vec(A B C) = kron(A, C') vec(B).
Vector vec(const Matrix& A);

// Inverse of vec for the given shape.
Matrix unvec(const Vector& v, Index rows, Index cols);

}  // namespace agcm
