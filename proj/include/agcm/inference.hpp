#pragma once

#include <utility>
#include <vector>

#include "agcm/estimation.hpp"

namespace agcm {

// Linear hypothesis C Theta_i V' = null_value on one coefficient block.
// An empty null_value means zero.
struct Hypothesis {
    int block = 0;
    Matrix C;  // s x m_i
    Matrix V;  // t x q_i
    Matrix null_value;
};

// Factors of the limiting covariance of sqrt(n) vec(Theta_hat_i - Theta_i):
// row factor n (X_i'X_i)^{-1}, column factor (Z_i' Sigma^{-1} Z_i)^{-1}.
// The full matrix is their Kronecker product (row-stacking vec order).
std::pair<Matrix, Matrix> coeff_asymptotic_covariance(const ModelSpec& spec,
                                                      const CovarianceEstimate& cov, int block);

// Inverse symmetric square root by eigendecomposition. Eigenvalues at or
// below dim * lambda_max * eps (or negative) raise NonsingularityViolated.
Matrix sym_inv_sqrt(const Matrix& A, const std::string& name);

// Standardized contrast
//   [C n(X'X)^{-1} C']^{-1/2} * sqrt(n) (C Theta_hat V' - null) * [V (Z'Sigma_hat^{-1}Z)^{-1} V']^{-1/2},
// asymptotically standard normal entrywise under the null.
Matrix standardized_statistic(const FitResult& fit, const ModelSpec& spec, const Hypothesis& hyp);

// Sample covariance of w = vec(e e') over the rows e of E (divisor N - 1).
Matrix phi2_from_rows(const Matrix& E);

// Monte Carlo summary of the limiting behaviour of one coefficient block,
// produced by normality_check.
struct AsymptoticReport {
    int block = 0;
    Index n = 0;
    long replications = 0;
    long failures = 0;

    Matrix row_factor;              // n (X'X)^{-1}
    Matrix col_factor;              // (Z' Sigma^{-1} Z)^{-1}, true Sigma
    Matrix theoretical_covariance;  // kron(row_factor, col_factor)
    Matrix empirical_covariance;    // of sqrt(n) vec(Theta_hat - Theta) across replications

    // Cross covariances with the other blocks' sqrt(n) vec(Theta_hat_j - Theta_j)
    // and with sqrt(n) vec(Sigma_hat - Sigma); the entrywise standard errors are
    // sqrt(var_a var_b / N), the null scale for independent components.
    std::vector<Matrix> cross_block_covariance;  // empty matrix at j == block
    std::vector<Matrix> cross_block_stderr;
    Matrix cross_sigma_covariance;
    Matrix cross_sigma_stderr;

    Matrix phi2;  // pooled estimate of Cov(vec(e e')) from the fit residual rows

    // Entrywise moments of sqrt(n) vec(Theta_hat - Theta) (scale-invariant ones)
    // and of the standardized statistic with C = I, V = I, null = Theta.
    Vector marginal_skewness;
    Vector marginal_excess_kurtosis;
    Vector statistic_mean;
    Vector statistic_variance;
    Vector statistic_skewness;
    Vector statistic_excess_kurtosis;
};

}  // namespace agcm
