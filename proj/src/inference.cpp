#include "agcm/inference.hpp"

#include <cmath>
#include <limits>

namespace agcm {

std::pair<Matrix, Matrix> coeff_asymptotic_covariance(const ModelSpec& spec,
                                                      const CovarianceEstimate& cov, int block) {
    if (block < 0 || block >= spec.block_count())
        throw ValidationError("block index " + std::to_string(block) + " out of range");
    const DesignBlock& b = spec.blocks[static_cast<std::size_t>(block)];

    const Matrix Gx = b.X.transpose() * b.X;
    const Index m = b.X.cols();
    Matrix row_factor = static_cast<double>(spec.n) * spd_solve(Gx, Matrix::Identity(m, m));

    const Matrix S = cov.solve(b.Z.matrix);
    Matrix G = b.Z.matrix.transpose() * S;
    G = ((G + G.transpose()) / 2.0).eval();
    Matrix col_factor;
    try {
        col_factor = SpdFactor(G).solve(Matrix::Identity(b.Z.cols(), b.Z.cols()));
    } catch (const NotPositiveDefinite& e) {
        throw IllConditionedProfile("pivot " + std::to_string(e.pivot) + " is " +
                                    std::to_string(e.value));
    }
    return {std::move(row_factor), std::move(col_factor)};
}

Matrix sym_inv_sqrt(const Matrix& A, const std::string& name) {
    if (A.rows() != A.cols()) throw ValidationError(name + ": matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(((A + A.transpose()) / 2.0).eval());
    if (eig.info() != Eigen::Success) throw NonsingularityViolated(name);
    const Vector& lambda = eig.eigenvalues();
    const double lambda_max = lambda.size() ? lambda.maxCoeff() : 0.0;
    const double cut = static_cast<double>(A.rows()) * std::abs(lambda_max) *
                       std::numeric_limits<double>::epsilon();
    Vector inv_sqrt(lambda.size());
    for (Index i = 0; i < lambda.size(); ++i) {
        if (!(lambda(i) > cut)) throw NonsingularityViolated(name);
        inv_sqrt(i) = 1.0 / std::sqrt(lambda(i));
    }
    return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix standardized_statistic(const FitResult& fit, const ModelSpec& spec, const Hypothesis& hyp) {
    if (hyp.block < 0 || hyp.block >= spec.block_count())
        throw ValidationError("block index " + std::to_string(hyp.block) + " out of range");
    if (fit.coefficients.size() != static_cast<std::size_t>(spec.block_count()))
        throw ValidationError("fit does not match the model: " +
                              std::to_string(fit.coefficients.size()) + " coefficient blocks vs " +
                              std::to_string(spec.block_count()));
    const DesignBlock& b = spec.blocks[static_cast<std::size_t>(hyp.block)];
    const Matrix& theta = fit.coefficients[static_cast<std::size_t>(hyp.block)];
    if (hyp.C.cols() != b.X.cols())
        throw ValidationError("C has " + std::to_string(hyp.C.cols()) + " columns, block has " +
                              std::to_string(b.X.cols()) + " design columns");
    if (hyp.V.cols() != b.Z.cols())
        throw ValidationError("V has " + std::to_string(hyp.V.cols()) + " columns, block has " +
                              std::to_string(b.Z.cols()) + " profile columns");
    if (hyp.C.rows() == 0 || hyp.V.rows() == 0) throw ValidationError("C and V must be nonempty");

    auto [row_factor, col_factor] = coeff_asymptotic_covariance(spec, fit.covariance, hyp.block);

    Matrix contrast = hyp.C * theta * hyp.V.transpose();
    if (hyp.null_value.size() != 0) {
        if (hyp.null_value.rows() != contrast.rows() || hyp.null_value.cols() != contrast.cols())
            throw ValidationError("null value is " + std::to_string(hyp.null_value.rows()) + "x" +
                                  std::to_string(hyp.null_value.cols()) + ", contrast is " +
                                  std::to_string(contrast.rows()) + "x" +
                                  std::to_string(contrast.cols()));
        contrast -= hyp.null_value;
    }
    contrast *= std::sqrt(static_cast<double>(spec.n));

    const Matrix row_std = sym_inv_sqrt(hyp.C * row_factor * hyp.C.transpose(), "row standardizer");
    const Matrix col_std =
        sym_inv_sqrt(hyp.V * col_factor * hyp.V.transpose(), "column standardizer");
    return row_std * contrast * col_std;
}

Matrix phi2_from_rows(const Matrix& E) {
    const Index N = E.rows();
    const Index p = E.cols();
    if (N < 2) throw ValidationError("phi2_from_rows: need at least two rows");
    const Index d = p * p;
    Matrix W(N, d);
    for (Index l = 0; l < N; ++l) {
        const Matrix outer = E.row(l).transpose() * E.row(l);
        W.row(l) = vec(outer).transpose();
    }
    const Eigen::RowVectorXd mean = W.colwise().mean();
    W.rowwise() -= mean;
    Matrix C = Matrix::Zero(d, d);
    C.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose(), 1.0 / static_cast<double>(N - 1));
    C.triangularView<Eigen::StrictlyUpper>() = C.transpose();
    return C;
}

}  // namespace agcm
