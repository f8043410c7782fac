#include "agcm/estimation.hpp"

#include <cmath>
#include <utility>

namespace agcm {

namespace {

void check_response(const Matrix& Y, const ModelSpec& spec) {
    if (Y.rows() != spec.n || Y.cols() != spec.p)
        throw ValidationError("response is " + std::to_string(Y.rows()) + "x" +
                              std::to_string(Y.cols()) + ", model expects " +
                              std::to_string(spec.n) + "x" + std::to_string(spec.p));
    if (!Y.allFinite()) throw ValidationError("response contains non-finite values");
}

}  // namespace

CovarianceEstimate quadratic_covariance(const Matrix& Y, const ModelSpec& spec) {
    check_response(Y, spec);
    // Q = (I - sum_i P_{X_i}) Y, accumulated through the small Gram systems so the
    // n x n projector is never formed.
    Matrix Q = Y;
    for (const DesignBlock& b : spec.blocks) {
        const Matrix G = b.X.transpose() * b.X;
        Q.noalias() -= b.X * spd_solve(G, b.X.transpose() * Y);
    }
    // Sigma_hat = Q'Q / r via a rank update: exactly symmetric, PSD by construction.
    Matrix S = Matrix::Zero(spec.p, spec.p);
    S.selfadjointView<Eigen::Lower>().rankUpdate(Q.transpose(), 1.0 / static_cast<double>(spec.residual_dof));
    S.triangularView<Eigen::StrictlyUpper>() = S.transpose();
    try {
        SpdFactor factor(S);
        return CovarianceEstimate{std::move(S), spec.residual_dof, std::move(factor)};
    } catch (const NotPositiveDefinite& e) {
        throw DegenerateCovariance("pivot " + std::to_string(e.pivot) + " of Sigma_hat is " +
                                   std::to_string(e.value));
    }
}

Matrix h_matrix(const CovarianceEstimate& cov, const Matrix& Z) {
    if (Z.rows() != cov.sigma_hat.rows())
        throw ValidationError("profile has " + std::to_string(Z.rows()) +
                              " rows, covariance is " + std::to_string(cov.sigma_hat.rows()) + "x" +
                              std::to_string(cov.sigma_hat.cols()));
    const Matrix S = cov.solve(Z);       // Sigma^{-1} Z
    Matrix G = Z.transpose() * S;        // Z' Sigma^{-1} Z
    G = ((G + G.transpose()) / 2.0).eval();
    try {
        SpdFactor gf(G);
        return S * gf.solve(Z.transpose());
    } catch (const NotPositiveDefinite& e) {
        throw IllConditionedProfile("pivot " + std::to_string(e.pivot) + " is " +
                                    std::to_string(e.value));
    }
}

Matrix h_matrix(const CovarianceEstimate& cov, const ProfileMatrix& Z) {
    return h_matrix(cov, Z.matrix);
}

double rmss(const Matrix& Y, const Matrix& mean_hat) {
    if (Y.rows() != mean_hat.rows() || Y.cols() != mean_hat.cols())
        throw ValidationError("rmss: shape mismatch");
    return (Y - mean_hat).squaredNorm();
}

double aic(double rmss_value, Index n, Index n_params) {
    if (!(rmss_value > 0.0) || !std::isfinite(rmss_value)) throw NonpositiveRmss(rmss_value);
    if (n < 1) throw ValidationError("aic: n must be positive");
    const double nn = static_cast<double>(n);
    return nn * std::log(rmss_value) + 2.0 * static_cast<double>(n_params + 1) - nn * std::log(nn);
}

FitResult fit_with_covariance(const Matrix& Y, const ModelSpec& spec, CovarianceEstimate cov) {
    check_response(Y, spec);
    if (cov.sigma_hat.rows() != spec.p)
        throw ValidationError("covariance dimension does not match the model");

    CoefficientSet coefficients;
    coefficients.reserve(spec.blocks.size());
    Matrix mean = Matrix::Zero(spec.n, spec.p);
    for (const DesignBlock& b : spec.blocks) {
        const Matrix H = h_matrix(cov, b.Z);
        const Matrix Gx = b.X.transpose() * b.X;
        const Matrix Gz = b.Z.matrix.transpose() * b.Z.matrix;
        // Theta_hat = (X'X)^{-1} X' Y H Z (Z'Z)^{-1}
        Matrix T = spd_solve(Gx, b.X.transpose() * Y * H * b.Z.matrix);
        T = spd_solve(Gz, T.transpose()).transpose();
        mean.noalias() += b.X * T * b.Z.matrix.transpose();
        coefficients.push_back(std::move(T));
    }

    FitResult out{std::move(coefficients), std::move(mean), Matrix(), 0.0, 0.0, spec.n_params(),
                  std::move(cov)};
    out.residual = Y - out.mean_hat;
    out.rmss = out.residual.squaredNorm();
    out.aic = aic(out.rmss, spec.n, out.n_params);
    return out;
}

FitResult fit(const Matrix& Y, const ModelSpec& spec) {
    return fit_with_covariance(Y, spec, quadratic_covariance(Y, spec));
}

FitResult fit_vec_form(const Matrix& Y, const ModelSpec& spec, Index size_limit) {
    check_response(Y, spec);
    const Index np = spec.n * spec.p;
    if (np > size_limit) throw SizeLimit(np, size_limit);

    CovarianceEstimate cov = quadratic_covariance(Y, spec);
    const Matrix sigma_inv = pinv(cov.sigma_hat);

    const Vector y = vec(Y);
    Vector mu = Vector::Zero(np);
    for (const DesignBlock& b : spec.blocks) {
        const Matrix& Z = b.Z.matrix;
        // H' = Z (Z' Sigma^{-1} Z)^+ Z' Sigma^{-1}
        const Matrix Ht = Z * pinv(Z.transpose() * sigma_inv * Z) * Z.transpose() * sigma_inv;
        mu += kron(projector(b.X), Ht) * y;
    }
    Matrix mean = unvec(mu, spec.n, spec.p);

    CoefficientSet coefficients;
    coefficients.reserve(spec.blocks.size());
    for (const DesignBlock& b : spec.blocks) {
        const Matrix& Z = b.Z.matrix;
        coefficients.push_back(pinv(b.X.transpose() * b.X) * b.X.transpose() * mean * Z *
                               pinv(Z.transpose() * Z));
    }

    FitResult out{std::move(coefficients), std::move(mean), Matrix(), 0.0, 0.0, spec.n_params(),
                  std::move(cov)};
    out.residual = Y - out.mean_hat;
    out.rmss = out.residual.squaredNorm();
    out.aic = aic(out.rmss, spec.n, out.n_params);
    return out;
}

}  // namespace agcm
