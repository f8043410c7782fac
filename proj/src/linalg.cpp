#include "agcm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace agcm {

namespace {

Eigen::JacobiSVD<Matrix> thin_svd(const Matrix& A) {
    return Eigen::JacobiSVD<Matrix>(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

Index rank_from_svd(Index rows, Index cols, const Eigen::JacobiSVD<Matrix>& svd) {
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    const double cut = rank_cutoff(rows, cols, s(0));
    Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return r;
}

}  // namespace

double rank_cutoff(Index rows, Index cols, double largest_singular_value) {
    return static_cast<double>(std::max(rows, cols)) * largest_singular_value *
           std::numeric_limits<double>::epsilon();
}

Index numerical_rank(const Matrix& A) {
    if (A.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(A);
    return rank_from_svd(A.rows(), A.cols(), svd);
}

Matrix projector(const Matrix& X) {
    if (X.size() == 0) throw ValidationError("projector: empty matrix");
    auto svd = thin_svd(X);
    const Index r = rank_from_svd(X.rows(), X.cols(), svd);
    if (r < X.cols())
        throw RankDeficient("matrix " + std::to_string(X.rows()) + "x" + std::to_string(X.cols()) +
                            " has numerical rank " + std::to_string(r));
    const Matrix U = svd.matrixU().leftCols(r);
    // Accumulating U U' through a rank update keeps the result exactly symmetric.
    Matrix P = Matrix::Zero(X.rows(), X.rows());
    P.selfadjointView<Eigen::Lower>().rankUpdate(U);
    P.triangularView<Eigen::StrictlyUpper>() = P.transpose();
    return P;
}

Matrix pinv(const Matrix& A) {
    if (A.size() == 0) return A.transpose();
    auto svd = thin_svd(A);
    const auto& s = svd.singularValues();
    const double cut = s.size() ? rank_cutoff(A.rows(), A.cols(), s(0)) : 0.0;
    Vector inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SpdFactor::SpdFactor(const Matrix& A) {
    if (A.rows() != A.cols()) throw ValidationError("SpdFactor: matrix must be square");
    const Index n = A.rows();
    Matrix L = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        const double d = A(j, j) - L.row(j).head(j).squaredNorm();
        if (!(d > 0.0) || !std::isfinite(d)) throw NotPositiveDefinite(j, d);
        L(j, j) = std::sqrt(d);
        const Index below = n - j - 1;
        if (below > 0) {
            L.col(j).tail(below) =
                (A.col(j).tail(below) -
                 L.bottomLeftCorner(below, j) * L.row(j).head(j).transpose()) /
                L(j, j);
        }
    }
    lower_ = std::move(L);
}

Matrix SpdFactor::solve(const Matrix& B) const {
    if (B.rows() != lower_.rows())
        throw ValidationError("SpdFactor::solve: right-hand side has " + std::to_string(B.rows()) +
                              " rows, expected " + std::to_string(lower_.rows()));
    Matrix X = lower_.triangularView<Eigen::Lower>().solve(B);
    lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(X);
    return X;
}

Matrix spd_solve(const Matrix& A, const Matrix& B) {
    return SpdFactor(A).solve(B);
}

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

Vector vec(const Matrix& A) {
    Vector v(A.size());
    for (Index i = 0; i < A.rows(); ++i)
        v.segment(i * A.cols(), A.cols()) = A.row(i).transpose();
    return v;
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
    if (v.size() != rows * cols)
        throw ValidationError("unvec: vector of size " + std::to_string(v.size()) +
                              " cannot fill a " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " matrix");
    Matrix A(rows, cols);
    for (Index i = 0; i < rows; ++i) A.row(i) = v.segment(i * cols, cols).transpose();
    return A;
}

}  // namespace agcm
