#include "agcm/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "agcm/parallel.hpp"

namespace agcm {

namespace {

// Per-experiment stream tags keep draws distinct across experiment kinds that
// share a master seed.
constexpr std::uint64_t kAicStream = 1;
constexpr std::uint64_t kConsistencyStream = 2;
constexpr std::uint64_t kNormalityStream = 3;

// Neumaier-compensated accumulator: sums are independent of how replications
// are later split and pooled, up to ~1 ulp.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void validate_scenario(const SimulationScenario& s) {
    if (s.group_sizes.empty()) throw EmptyDesign();
    for (std::size_t g = 0; g < s.group_sizes.size(); ++g)
        if (s.group_sizes[g] < 1) throw EmptyGroup("group " + std::to_string(g + 1));
    if (s.coefficients.size() != s.group_sizes.size())
        throw ValidationError("scenario has " + std::to_string(s.coefficients.size()) +
                              " coefficient rows for " + std::to_string(s.group_sizes.size()) +
                              " groups");
    for (const Matrix& theta : s.coefficients)
        if (theta.rows() != 1 || theta.cols() < 1)
            throw ValidationError("scenario coefficients must be single nonempty rows");
    const Index p = s.timepoints.size();
    if (p < 1) throw ValidationError("scenario needs at least one timepoint");
    if (s.covariance.rows() != p || s.covariance.cols() != p)
        throw ValidationError("scenario covariance is " + std::to_string(s.covariance.rows()) +
                              "x" + std::to_string(s.covariance.cols()) + ", timepoints give p = " +
                              std::to_string(p));
}

long check_failures(long failures, long total) {
    if (failures > kMaxFailureShare * static_cast<double>(total) || failures >= total)
        throw ExperimentUnstable(failures, total);
    return total - failures;
}

void column_moments(const Matrix& D, Vector& mean, Vector& var, Vector& skew, Vector& exkurt) {
    const Index N = D.rows();
    const Index d = D.cols();
    mean = D.colwise().mean();
    var = skew = exkurt = Vector::Zero(d);
    if (N < 2) return;
    for (Index c = 0; c < d; ++c) {
        const Vector centered = D.col(c).array() - mean(c);
        const double m2 = centered.squaredNorm() / static_cast<double>(N);
        const double m3 = centered.array().pow(3).sum() / static_cast<double>(N);
        const double m4 = centered.array().pow(4).sum() / static_cast<double>(N);
        var(c) = centered.squaredNorm() / static_cast<double>(N - 1);
        if (m2 > 0.0) {
            skew(c) = m3 / std::pow(m2, 1.5);
            exkurt(c) = m4 / (m2 * m2) - 3.0;
        }
    }
}

Matrix sample_covariance(const Matrix& D) {
    const Index N = D.rows();
    Matrix centered = D.rowwise() - D.colwise().mean();
    Matrix C = Matrix::Zero(D.cols(), D.cols());
    C.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(),
                                                 1.0 / static_cast<double>(N - 1));
    C.triangularView<Eigen::StrictlyUpper>() = C.transpose();
    return C;
}

Matrix cross_covariance(const Matrix& A, const Matrix& B) {
    const Index N = A.rows();
    const Matrix Ac = A.rowwise() - A.colwise().mean();
    const Matrix Bc = B.rowwise() - B.colwise().mean();
    return Ac.transpose() * Bc / static_cast<double>(N - 1);
}

// Entrywise null-scale standard error of a cross covariance between
// independent components: sqrt(var_a * var_b / N).
Matrix independence_stderr(const Matrix& A, const Matrix& B) {
    const double N = static_cast<double>(A.rows());
    const Vector va =
        (A.rowwise() - A.colwise().mean()).colwise().squaredNorm().transpose() / (N - 1.0);
    const Vector vb =
        (B.rowwise() - B.colwise().mean()).colwise().squaredNorm().transpose() / (N - 1.0);
    return ((va * vb.transpose()).array() / N).sqrt();
}

}  // namespace

Matrix serial_sigma(double rho, Index p) {
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidCorrelation(rho);
    if (p < 1) throw ValidationError("serial_sigma: p must be positive");
    Matrix S(p, p);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) S(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
    return S;
}

Index SimulationScenario::n() const {
    return std::accumulate(group_sizes.begin(), group_sizes.end(), Index{0});
}

int SimulationScenario::min_degree() const {
    int d = degree(0);
    for (int g = 1; g < group_count(); ++g) d = std::min(d, degree(g));
    return d;
}

int SimulationScenario::max_degree() const {
    int d = degree(0);
    for (int g = 1; g < group_count(); ++g) d = std::max(d, degree(g));
    return d;
}

SimulationScenario default_scenario(int n, double rho, std::uint64_t seed) {
    if (n < 2 || n % 2 != 0)
        throw ValidationError("default scenario needs an even n >= 2, got " + std::to_string(n));
    SimulationScenario s;
    s.group_sizes = {n / 2, n / 2};
    s.timepoints = Vector(4);
    s.timepoints << -1.0, -0.5, 0.5, 1.0;
    Matrix b1(1, 2), b2(1, 4);
    b1 << 4.0, 2.0;
    b2 << 3.0, 2.0, -3.0, 2.0;
    s.coefficients = {b1, b2};
    s.covariance = serial_sigma(rho, 4);
    s.rho = rho;
    s.seed = seed;
    return s;
}

Matrix scenario_means(const SimulationScenario& s) {
    validate_scenario(s);
    Matrix means(s.group_count(), s.p());
    for (int g = 0; g < s.group_count(); ++g) {
        const ProfileMatrix Z = build_polynomial_profile(s.timepoints, s.degree(g));
        means.row(g) = s.coefficients[static_cast<std::size_t>(g)] * Z.matrix.transpose();
    }
    return means;
}

ModelSpec scenario_spec(const SimulationScenario& s) {
    validate_scenario(s);
    std::vector<Matrix> indicators = build_group_indicator(s.group_sizes);
    std::vector<DesignBlock> blocks;
    blocks.reserve(indicators.size());
    for (int g = 0; g < s.group_count(); ++g) {
        blocks.push_back(DesignBlock{std::move(indicators[static_cast<std::size_t>(g)]),
                                     build_polynomial_profile(s.timepoints, s.degree(g)),
                                     "group " + std::to_string(g + 1)});
    }
    return validate(std::move(blocks));
}

ModelSpec shared_profile_spec(const SimulationScenario& s, int degree) {
    validate_scenario(s);
    const std::vector<Matrix> indicators = build_group_indicator(s.group_sizes);
    Matrix X(s.n(), s.group_count());
    for (int g = 0; g < s.group_count(); ++g) X.col(g) = indicators[static_cast<std::size_t>(g)];
    std::vector<DesignBlock> blocks;
    blocks.push_back(DesignBlock{std::move(X), build_polynomial_profile(s.timepoints, degree),
                                 "shared degree " + std::to_string(degree)});
    return validate(std::move(blocks));
}

SimulationScenario resize_scenario(SimulationScenario s, int n) {
    validate_scenario(s);
    const int k = s.group_count();
    if (n < k)
        throw ValidationError("cannot spread n = " + std::to_string(n) + " over " +
                              std::to_string(k) + " groups");
    const double total = static_cast<double>(s.n());
    std::vector<int> sizes(static_cast<std::size_t>(k));
    std::vector<std::pair<double, int>> remainder(static_cast<std::size_t>(k));
    int assigned = 0;
    for (int g = 0; g < k; ++g) {
        const double ideal = n * (s.group_sizes[static_cast<std::size_t>(g)] / total);
        sizes[static_cast<std::size_t>(g)] = static_cast<int>(std::floor(ideal));
        remainder[static_cast<std::size_t>(g)] = {ideal - std::floor(ideal), g};
        assigned += sizes[static_cast<std::size_t>(g)];
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int extra = 0; extra < n - assigned; ++extra)
        ++sizes[static_cast<std::size_t>(remainder[static_cast<std::size_t>(extra % k)].second)];
    for (int g = 0; g < k; ++g) {
        while (sizes[static_cast<std::size_t>(g)] < 1) {
            const auto largest = std::max_element(sizes.begin(), sizes.end());
            --*largest;
            ++sizes[static_cast<std::size_t>(g)];
        }
    }
    s.group_sizes = std::move(sizes);
    return s;
}

Matrix generate(const SimulationScenario& s) { return generate(s, s.seed); }

Matrix generate(const SimulationScenario& s, std::uint64_t stream_seed) {
    validate_scenario(s);
    const Index p = s.p();
    const Matrix means = scenario_means(s);
    const Matrix L = SpdFactor(s.covariance).lower();

    Engine engine = make_engine(stream_seed);
    Matrix Y(s.n(), p);
    Vector z(p);
    auto fill = [&](auto&& draw) {
        Index row = 0;
        for (int g = 0; g < s.group_count(); ++g) {
            for (int l = 0; l < s.group_sizes[static_cast<std::size_t>(g)]; ++l, ++row) {
                for (Index j = 0; j < p; ++j) z(j) = draw();
                Y.row(row) = means.row(g) + (L * z).transpose();
            }
        }
    };
    if (s.law == ErrorLaw::kGaussian) {
        std::normal_distribution<double> normal(0.0, 1.0);
        fill([&] { return normal(engine); });
    } else {
        const double half_width = std::sqrt(3.0);  // unit variance
        std::uniform_real_distribution<double> uniform(-half_width, half_width);
        fill([&] { return uniform(engine); });
    }
    return Y;
}

McAicPoint mc_aic_point(const SimulationScenario& s, int n, long rep_begin, long rep_end,
                        bool retain_draws) {
    if (rep_begin < 0 || rep_end <= rep_begin)
        throw ValidationError("empty or negative replication range");
    const SimulationScenario rs = resize_scenario(s, n);
    const ModelSpec spec_min = shared_profile_spec(rs, rs.min_degree());
    const ModelSpec spec_max = shared_profile_spec(rs, rs.max_degree());
    const ModelSpec spec_add = scenario_spec(rs);

    const std::uint64_t point_seed =
        substream_seed(substream_seed(s.seed, kAicStream), static_cast<std::uint64_t>(n));
    const std::size_t count = static_cast<std::size_t>(rep_end - rep_begin);
    std::vector<std::array<double, 3>> values(count);
    std::vector<char> ok(count, 0);

    parallel_for_index(count, [&](std::size_t idx) {
        const std::uint64_t rep = static_cast<std::uint64_t>(rep_begin) + idx;
        const Matrix Y = generate(rs, substream_seed(point_seed, rep));
        try {
            values[idx] = {fit(Y, spec_min).aic, fit(Y, spec_max).aic, fit(Y, spec_add).aic};
            ok[idx] = 1;
        } catch (const Error&) {
            // degenerate replication: dropped and counted below
        }
    });

    McAicPoint point;
    point.n = n;
    CompensatedSum sums[3];
    for (std::size_t idx = 0; idx < count; ++idx) {
        if (!ok[idx]) {
            ++point.failures;
            continue;
        }
        for (int m = 0; m < 3; ++m) sums[m].add(values[idx][m]);
        if (retain_draws) point.draws.push_back(values[idx]);
    }
    const long n_ok = check_failures(point.failures, rep_end - rep_begin);
    const double mean[3] = {sums[0].value() / n_ok, sums[1].value() / n_ok,
                            sums[2].value() / n_ok};
    CompensatedSum squares[3];
    for (std::size_t idx = 0; idx < count; ++idx) {
        if (!ok[idx]) continue;
        for (int m = 0; m < 3; ++m) {
            const double c = values[idx][m] - mean[m];
            squares[m].add(c * c);
        }
    }
    point.aic_shared_min = mean[0];
    point.aic_shared_max = mean[1];
    point.aic_additive = mean[2];
    if (n_ok > 1) {
        point.var_shared_min = squares[0].value() / (n_ok - 1);
        point.var_shared_max = squares[1].value() / (n_ok - 1);
        point.var_additive = squares[2].value() / (n_ok - 1);
    }
    return point;
}

McReport mc_aic(const SimulationScenario& s, const std::vector<int>& n_grid, long replications,
                bool retain_draws) {
    if (n_grid.empty()) throw ValidationError("empty sample-size grid");
    if (replications < 1) throw ValidationError("at least one replication is required");
    for (int n : n_grid)
        if (n < 2 || n % 2 != 0)
            throw ValidationError("averaged-AIC grid requires even sample sizes, got " +
                                  std::to_string(n));

    const auto start = std::chrono::steady_clock::now();
    McReport report;
    report.replications = replications;
    report.seed = s.seed;
    report.rho = s.rho;
    report.shared_min_degree = s.min_degree();
    report.shared_max_degree = s.max_degree();
    for (int n : n_grid) report.points.push_back(mc_aic_point(s, n, 0, replications, retain_draws));
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<ConsistencyPoint> consistency_sweep(const SimulationScenario& s,
                                                const std::vector<int>& n_grid,
                                                long replications) {
    if (n_grid.empty()) throw ValidationError("empty sample-size grid");
    if (replications < 1) throw ValidationError("at least one replication is required");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw ValidationError("consistency grid must be strictly increasing");

    std::vector<ConsistencyPoint> table;
    table.reserve(n_grid.size());
    for (int n : n_grid) {
        const SimulationScenario rs = resize_scenario(s, n);
        const ModelSpec spec = scenario_spec(rs);
        const int k = spec.block_count();
        const std::uint64_t point_seed =
            substream_seed(substream_seed(s.seed, kConsistencyStream), static_cast<std::uint64_t>(n));

        const std::size_t count = static_cast<std::size_t>(replications);
        Matrix errors(count, k + 1);
        std::vector<char> ok(count, 0);
        parallel_for_index(count, [&](std::size_t idx) {
            const Matrix Y = generate(rs, substream_seed(point_seed, idx));
            try {
                const FitResult fr = fit(Y, spec);
                errors(idx, 0) = (fr.covariance.sigma_hat - rs.covariance).cwiseAbs().maxCoeff();
                for (int j = 0; j < k; ++j)
                    errors(idx, j + 1) = (fr.coefficients[static_cast<std::size_t>(j)] -
                                          rs.coefficients[static_cast<std::size_t>(j)])
                                             .cwiseAbs()
                                             .maxCoeff();
                ok[idx] = 1;
            } catch (const Error&) {
            }
        });

        ConsistencyPoint point;
        point.n = n;
        point.coefficient_error.assign(static_cast<std::size_t>(k), 0.0);
        std::vector<CompensatedSum> sums(static_cast<std::size_t>(k + 1));
        for (std::size_t idx = 0; idx < count; ++idx) {
            if (!ok[idx]) {
                ++point.failures;
                continue;
            }
            for (int c = 0; c <= k; ++c) sums[static_cast<std::size_t>(c)].add(errors(idx, c));
        }
        const long n_ok = check_failures(point.failures, replications);
        point.sigma_error = sums[0].value() / n_ok;
        for (int j = 0; j < k; ++j)
            point.coefficient_error[static_cast<std::size_t>(j)] =
                sums[static_cast<std::size_t>(j + 1)].value() / n_ok;
        table.push_back(std::move(point));
    }
    return table;
}

AsymptoticReport normality_check(const SimulationScenario& s, int n, long replications,
                                 int block) {
    if (replications < 2) throw ValidationError("normality check needs at least two replications");
    const SimulationScenario rs = resize_scenario(s, n);
    const ModelSpec spec = scenario_spec(rs);
    const int k = spec.block_count();
    if (block < 0 || block >= k)
        throw ValidationError("block index " + std::to_string(block) + " out of range");

    const Index p = spec.p;
    const double sqrt_n = std::sqrt(static_cast<double>(spec.n));
    CovarianceEstimate true_cov{rs.covariance, spec.residual_dof, SpdFactor(rs.covariance)};
    auto [row_factor, col_factor] = coeff_asymptotic_covariance(spec, true_cov, block);

    std::vector<Index> dims(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        dims[static_cast<std::size_t>(j)] =
            spec.blocks[static_cast<std::size_t>(j)].X.cols() * spec.blocks[static_cast<std::size_t>(j)].Z.cols();

    const std::size_t count = static_cast<std::size_t>(replications);
    std::vector<Matrix> theta_draws(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        theta_draws[static_cast<std::size_t>(j)] = Matrix(count, dims[static_cast<std::size_t>(j)]);
    Matrix sigma_draws(count, p * p);
    Matrix stat_draws(count, dims[static_cast<std::size_t>(block)]);
    std::vector<Vector> w_sum(count);
    std::vector<Matrix> ww_sum(count);
    std::vector<char> ok(count, 0);

    const Matrix& true_theta = rs.coefficients[static_cast<std::size_t>(block)];
    Hypothesis null_hypothesis{block, Matrix::Identity(true_theta.rows(), true_theta.rows()),
                               Matrix::Identity(true_theta.cols(), true_theta.cols()), true_theta};

    const std::uint64_t point_seed =
        substream_seed(substream_seed(s.seed, kNormalityStream), static_cast<std::uint64_t>(n));
    parallel_for_index(count, [&](std::size_t idx) {
        const Matrix Y = generate(rs, substream_seed(point_seed, idx));
        try {
            const FitResult fr = fit(Y, spec);
            for (int j = 0; j < k; ++j)
                theta_draws[static_cast<std::size_t>(j)].row(idx) =
                    sqrt_n * vec(fr.coefficients[static_cast<std::size_t>(j)] -
                                 rs.coefficients[static_cast<std::size_t>(j)])
                                 .transpose();
            sigma_draws.row(idx) =
                sqrt_n * vec(fr.covariance.sigma_hat - rs.covariance).transpose();
            stat_draws.row(idx) = vec(standardized_statistic(fr, spec, null_hypothesis)).transpose();

            Vector wsum = Vector::Zero(p * p);
            Matrix wwsum = Matrix::Zero(p * p, p * p);
            for (Index l = 0; l < fr.residual.rows(); ++l) {
                const Vector w = vec(fr.residual.row(l).transpose() * fr.residual.row(l));
                wsum += w;
                wwsum.selfadjointView<Eigen::Lower>().rankUpdate(w);
            }
            w_sum[idx] = std::move(wsum);
            ww_sum[idx] = std::move(wwsum);
            ok[idx] = 1;
        } catch (const Error&) {
        }
    });

    AsymptoticReport report;
    report.block = block;
    report.n = spec.n;
    report.replications = replications;
    for (std::size_t idx = 0; idx < count; ++idx)
        if (!ok[idx]) ++report.failures;
    const long n_ok = check_failures(report.failures, replications);

    // Compact the per-replication rows down to the successes, in index order.
    auto compact = [&](const Matrix& D) {
        Matrix C(n_ok, D.cols());
        Index at = 0;
        for (std::size_t idx = 0; idx < count; ++idx)
            if (ok[idx]) C.row(at++) = D.row(idx);
        return C;
    };
    for (int j = 0; j < k; ++j)
        theta_draws[static_cast<std::size_t>(j)] = compact(theta_draws[static_cast<std::size_t>(j)]);
    sigma_draws = compact(sigma_draws);
    stat_draws = compact(stat_draws);

    report.row_factor = std::move(row_factor);
    report.col_factor = std::move(col_factor);
    report.theoretical_covariance = kron(report.row_factor, report.col_factor);
    const Matrix& own = theta_draws[static_cast<std::size_t>(block)];
    report.empirical_covariance = sample_covariance(own);

    report.cross_block_covariance.resize(static_cast<std::size_t>(k));
    report.cross_block_stderr.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        if (j == block) continue;
        const Matrix& other = theta_draws[static_cast<std::size_t>(j)];
        report.cross_block_covariance[static_cast<std::size_t>(j)] = cross_covariance(own, other);
        report.cross_block_stderr[static_cast<std::size_t>(j)] = independence_stderr(own, other);
    }
    report.cross_sigma_covariance = cross_covariance(own, sigma_draws);
    report.cross_sigma_stderr = independence_stderr(own, sigma_draws);

    // Pooled residual-row estimate of Cov(vec(e e')).
    Vector w_total = Vector::Zero(p * p);
    Matrix ww_total = Matrix::Zero(p * p, p * p);
    for (std::size_t idx = 0; idx < count; ++idx) {
        if (!ok[idx]) continue;
        w_total += w_sum[idx];
        ww_total += ww_sum[idx];
    }
    ww_total.triangularView<Eigen::StrictlyUpper>() = ww_total.transpose();
    const double rows_total = static_cast<double>(n_ok) * static_cast<double>(spec.n);
    const Vector w_mean = w_total / rows_total;
    // The outer product is formed on its own so the centering stays exactly symmetric.
    const Matrix w_outer = w_mean * w_mean.transpose();
    report.phi2 = (ww_total - rows_total * w_outer) / (rows_total - 1.0);

    Vector mean, var;
    column_moments(own, mean, var, report.marginal_skewness, report.marginal_excess_kurtosis);
    column_moments(stat_draws, report.statistic_mean, report.statistic_variance,
                   report.statistic_skewness, report.statistic_excess_kurtosis);
    return report;
}

}  // namespace agcm
