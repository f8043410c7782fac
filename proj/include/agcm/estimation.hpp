#pragma once

#include "agcm/model.hpp"

namespace agcm {

// First-stage covariance estimate Sigma_hat = Y' W Y with
// W = (1/r) (I - sum_i P_{X_i}) and r the residual degrees of freedom.
// Sigma_hat is symmetric positive semidefinite by construction; the stored
// factorization certifies strict definiteness.
struct CovarianceEstimate {
    Matrix sigma_hat;  // p x p
    Index divisor;     // r
    SpdFactor factor;  // Cholesky factor of sigma_hat

    // Sigma_hat^{-1} B without forming the inverse.
    Matrix solve(const Matrix& B) const { return factor.solve(B); }
};

CovarianceEstimate quadratic_covariance(const Matrix& Y, const ModelSpec& spec);

// Oblique projection H = Sigma^{-1} Z (Z' Sigma^{-1} Z)^{-1} Z'.
// Idempotent, and Z' H = Z'.
Matrix h_matrix(const CovarianceEstimate& cov, const Matrix& Z);
Matrix h_matrix(const CovarianceEstimate& cov, const ProfileMatrix& Z);

struct FitResult {
    CoefficientSet coefficients;  // Theta_hat_i, one m_i x q_i matrix per block
    Matrix mean_hat;              // n x p fitted mean
    Matrix residual;              // Y - mean_hat
    double rmss = 0.0;            // tr(residual' residual)
    double aic = 0.0;
    Index n_params = 0;           // sum_i m_i * q_i
    CovarianceEstimate covariance;
};

double rmss(const Matrix& Y, const Matrix& mean_hat);

// n ln(RMSS) + 2 (n_params + 1) - n ln(n).
double aic(double rmss_value, Index n, Index n_params);

// Two-stage estimator: plug the quadratic covariance estimate into the GLS
// normal equations of each block.
FitResult fit(const Matrix& Y, const ModelSpec& spec);

// Same estimator with a caller-supplied first-stage covariance.
FitResult fit_with_covariance(const Matrix& Y, const ModelSpec& spec, CovarianceEstimate cov);

inline constexpr Index kVecFormSizeLimit = 4096;

// Equivalent estimator assembled as one np x np operator,
// vec(mean) = sum_i kron(P_{X_i}, H_i') vec(Y), with pseudoinverses instead of
// Cholesky solves throughout. Quadratic-size route intended as a cross-check
// on small problems; refuses n * p beyond size_limit.
FitResult fit_vec_form(const Matrix& Y, const ModelSpec& spec, Index size_limit = kVecFormSizeLimit);

}  // namespace agcm
