#include <doctest.h>

#include <random>

#include "agcm/inference.hpp"

using namespace agcm;

namespace {

double max_abs(const Matrix& A) { return A.cwiseAbs().maxCoeff(); }

Vector standard_times() {
    Vector t(4);
    t << -1.0, -0.5, 0.5, 1.0;
    return t;
}

Matrix serial(double rho, Index p) {
    Matrix S(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) S(i, j) = std::pow(rho, std::abs(double(i - j)));
    return S;
}

CovarianceEstimate known_covariance(Matrix S, Index divisor) {
    SpdFactor factor(S);
    return CovarianceEstimate{std::move(S), divisor, std::move(factor)};
}

Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix A(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) A(i, j) = normal(rng);
    return A;
}

// one block, X'X = n * I_2 by a sign-balanced design
ModelSpec standardized_spec(Matrix Z) {
    const Index n = 8;
    Matrix X(n, 2);
    for (Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = (i % 2 == 0) ? 1.0 : -1.0;
    }
    ProfileMatrix prof{standard_times(), static_cast<int>(Z.cols()) - 1, std::move(Z)};
    return validate({DesignBlock{std::move(X), std::move(prof), "balanced"}});
}

ModelSpec two_group_spec(int n1, int n2, int d1, int d2) {
    auto X = build_group_indicator({n1, n2});
    std::vector<DesignBlock> blocks;
    blocks.push_back({X[0], build_polynomial_profile(standard_times(), d1), "group 1"});
    blocks.push_back({X[1], build_polynomial_profile(standard_times(), d2), "group 2"});
    return validate(std::move(blocks));
}

}  // namespace

TEST_CASE("asymptotic factors are identities in the fully standardized case") {
    std::mt19937_64 rng(201);
    Eigen::HouseholderQR<Matrix> qr(random_matrix(4, 2, rng));
    Matrix Z = qr.householderQ() * Matrix::Identity(4, 2);
    ModelSpec spec = standardized_spec(Z);
    CovarianceEstimate cov = known_covariance(Matrix::Identity(4, 4), 6);

    auto [row, col] = coeff_asymptotic_covariance(spec, cov, 0);
    CHECK(max_abs(row - Matrix::Identity(2, 2)) < 1e-12);
    CHECK(max_abs(col - Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("row factor of a balanced two-group indicator design is 2") {
    ModelSpec spec = two_group_spec(10, 10, 1, 3);
    CovarianceEstimate cov = known_covariance(serial(0.5, 4), 18);
    auto [row0, col0] = coeff_asymptotic_covariance(spec, cov, 0);
    CHECK(row0.rows() == 1);
    CHECK(row0(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    auto [row1, col1] = coeff_asymptotic_covariance(spec, cov, 1);
    CHECK(col1.rows() == 4);
    CHECK(col0.rows() == 2);
}

TEST_CASE("column factor agrees with an explicit two-inverse computation") {
    ModelSpec spec = two_group_spec(10, 10, 1, 1);
    Matrix sigma = serial(0.5, 4);
    CovarianceEstimate cov = known_covariance(sigma, 18);
    auto [row, col] = coeff_asymptotic_covariance(spec, cov, 0);

    const Matrix& Z = spec.blocks[0].Z.matrix;
    Matrix expected = (Z.transpose() * sigma.inverse() * Z).inverse();
    CHECK(max_abs(col - expected) < 1e-10);
    CHECK_THROWS_AS(coeff_asymptotic_covariance(spec, cov, 2), ValidationError);
}

TEST_CASE("sym_inv_sqrt inverts the square of a positive definite matrix") {
    std::mt19937_64 rng(202);
    Matrix M = random_matrix(5, 5, rng);
    Matrix A = M * M.transpose() + Matrix::Identity(5, 5);
    Matrix B = sym_inv_sqrt(A, "test");
    CHECK(max_abs(B * A * B - Matrix::Identity(5, 5)) < 1e-11);
    CHECK(max_abs(B - B.transpose()) < 1e-12);
}

TEST_CASE("sym_inv_sqrt reports the failing standardizer by name") {
    try {
        sym_inv_sqrt(Matrix::Ones(2, 2), "row standardizer");
        FAIL("expected NonsingularityViolated");
    } catch (const NonsingularityViolated& e) {
        CHECK(e.standardizer == "row standardizer");
    }
    CHECK_THROWS_AS(sym_inv_sqrt(Matrix::Ones(2, 3), "x"), ValidationError);
    CHECK_THROWS_AS(sym_inv_sqrt(-Matrix::Identity(2, 2), "x"), NonsingularityViolated);
}

TEST_CASE("standardized statistic vanishes at the fitted value and scales away C and V") {
    std::mt19937_64 rng(203);
    ModelSpec spec = two_group_spec(10, 10, 1, 3);
    Matrix Y = random_matrix(20, 4, rng);
    for (Index i = 0; i < 10; ++i) Y.row(i) += 3.0 * standard_times().transpose();
    FitResult f = fit(Y, spec);

    Hypothesis at_fit;
    at_fit.block = 0;
    at_fit.C = Matrix::Identity(1, 1);
    at_fit.V = Matrix::Identity(2, 2);
    at_fit.null_value = f.coefficients[0];
    CHECK(max_abs(standardized_statistic(f, spec, at_fit)) < 1e-12);

    Hypothesis base = at_fit;
    base.null_value = Matrix();
    Matrix stat = standardized_statistic(f, spec, base);
    CHECK(stat.rows() == 1);
    CHECK(stat.cols() == 2);

    Hypothesis scaled = base;
    scaled.C *= 7.0;
    scaled.V *= 0.25;
    CHECK(max_abs(standardized_statistic(f, spec, scaled) - stat) < 1e-10);
}

TEST_CASE("scalar standardized statistic matches the hand-built formula") {
    std::mt19937_64 rng(204);
    ModelSpec spec = two_group_spec(10, 10, 1, 1);
    Matrix Y = random_matrix(20, 4, rng);
    FitResult f = fit(Y, spec);

    Hypothesis hyp;
    hyp.block = 1;
    hyp.C = Matrix::Identity(1, 1);
    Matrix V(1, 2);
    V << 0.0, 1.0;  // picks the slope entry
    hyp.V = V;

    auto [row, col] = coeff_asymptotic_covariance(spec, f.covariance, 1);
    double expected = std::sqrt(20.0) * f.coefficients[1](0, 1) /
                      std::sqrt(row(0, 0) * col(1, 1));
    Matrix stat = standardized_statistic(f, spec, hyp);
    CHECK(stat(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("standardized statistic validates its inputs") {
    std::mt19937_64 rng(205);
    ModelSpec spec = two_group_spec(10, 10, 1, 1);
    Matrix Y = random_matrix(20, 4, rng);
    FitResult f = fit(Y, spec);

    Hypothesis hyp;
    hyp.block = 0;
    hyp.C = Matrix::Identity(1, 1);
    hyp.V = Matrix::Identity(3, 3);  // wrong width for a linear profile
    CHECK_THROWS_AS(standardized_statistic(f, spec, hyp), ValidationError);

    hyp.V = Matrix::Identity(2, 2);
    hyp.block = 5;
    CHECK_THROWS_AS(standardized_statistic(f, spec, hyp), ValidationError);

    hyp.block = 0;
    hyp.null_value = Matrix::Zero(3, 3);
    CHECK_THROWS_AS(standardized_statistic(f, spec, hyp), ValidationError);

    // duplicated contrast rows make the row standardizer singular
    hyp.null_value = Matrix();
    Matrix C(2, 1);
    C << 1.0, 1.0;
    hyp.C = C;
    CHECK_THROWS_AS(standardized_statistic(f, spec, hyp), NonsingularityViolated);
}

TEST_CASE("phi2_from_rows recovers the Gaussian fourth-moment structure") {
    std::mt19937_64 rng(206);
    const Index N = 400000;
    Matrix sigma = serial(0.5, 2);
    Matrix L = SpdFactor(sigma).lower();
    std::normal_distribution<double> normal;
    Matrix E(N, 2);
    for (Index l = 0; l < N; ++l) {
        Vector z(2);
        z << normal(rng), normal(rng);
        E.row(l) = (L * z).transpose();
    }

    Matrix phi2 = phi2_from_rows(E);
    CHECK(phi2.rows() == 4);
    CHECK((phi2 - phi2.transpose()).norm() == 0.0);

    // Cov(e_a e_b, e_c e_d) = sigma_ac sigma_bd + sigma_ad sigma_bc
    Matrix expected(4, 4);
    for (Index a = 0; a < 2; ++a)
        for (Index b = 0; b < 2; ++b)
            for (Index c = 0; c < 2; ++c)
                for (Index d = 0; d < 2; ++d)
                    expected(a * 2 + b, c * 2 + d) = sigma(a, c) * sigma(b, d) + sigma(a, d) * sigma(b, c);
    CHECK(max_abs(phi2 - expected) < 0.07);

    CHECK_THROWS_AS(phi2_from_rows(Matrix::Ones(1, 2)), ValidationError);
}
