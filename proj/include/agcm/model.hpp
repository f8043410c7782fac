#pragma once

#include <string>
#include <vector>

#include "agcm/linalg.hpp"

namespace agcm {

// Within-subject polynomial basis: p x (degree + 1), column j holds t^j.
struct ProfileMatrix {
    Vector timepoints;
    int degree = 0;
    Matrix matrix;

    Index rows() const { return matrix.rows(); }
    Index cols() const { return matrix.cols(); }
};

ProfileMatrix build_polynomial_profile(const Vector& timepoints, int degree);

// One additive term X Theta Z' of the mean model.
struct DesignBlock {
    Matrix X;         // n x m between-subject design
    ProfileMatrix Z;  // p x q within-subject profile
    std::string label;
};

// One 0/1 indicator column per group; rows of a group are contiguous and in
// input order, so the columns are trivially orthogonal.
std::vector<Matrix> build_group_indicator(const std::vector<int>& group_sizes);

// A validated additive model. Only validate() produces one.
struct ModelSpec {
    std::vector<DesignBlock> blocks;
    Index n = 0;
    Index p = 0;
    Index residual_dof = 0;  // r = n - sum_i rank(X_i)

    int block_count() const { return static_cast<int>(blocks.size()); }
    Index n_params() const;  // sum_i m_i * q_i
};

inline constexpr double kOrthogonalityTol = 1e-10;

// Checks the standing assumptions of the model: at least one block, matching
// shapes and timepoints, full-rank designs and profiles, mutually orthogonal
// between-subject designs, and enough residual degrees of freedom (r >= p)
// for the covariance estimator.
//
// Orthogonality is relative: |(X_i' X_j)_(a,b)| is compared against
// tol * max(1, ||X_i||_max * ||X_j||_max * n).
ModelSpec validate(std::vector<DesignBlock> blocks, double tol = kOrthogonalityTol);

// Per-block coefficient matrices Theta_i (m_i x q_i).
using CoefficientSet = std::vector<Matrix>;

}  // namespace agcm
