#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "agcm/inference.hpp"
#include "agcm/rng.hpp"

namespace agcm {

// Serial correlation matrix: entry (i, j) = rho^|i-j|. Positive definite for
// rho in [0, 1); rho = 0 is the independence edge case.
Matrix serial_sigma(double rho, Index p);

enum class ErrorLaw {
    kGaussian,
    // Entries i.i.d. uniform on (-sqrt(3), sqrt(3)): unit variance, symmetric
    // about zero by construction, so all third moments vanish.
    kSymmetricUniform,
};

// A grouped growth-curve population. Group i contributes group_sizes[i]
// consecutive rows with mean coefficients[i] * Z_i' (Z_i the monomial profile
// of that group's degree at the shared timepoints) plus correlated noise.
struct SimulationScenario {
    std::vector<int> group_sizes;
    Vector timepoints;
    CoefficientSet coefficients;  // one 1 x (degree_i + 1) row matrix per group
    Matrix covariance;            // p x p symmetric positive definite
    std::optional<double> rho;    // set when covariance came from serial_sigma
    ErrorLaw law = ErrorLaw::kGaussian;
    std::uint64_t seed = 0;

    Index n() const;
    Index p() const { return timepoints.size(); }
    int group_count() const { return static_cast<int>(group_sizes.size()); }
    int degree(int i) const { return static_cast<int>(coefficients[static_cast<std::size_t>(i)].cols()) - 1; }
    int min_degree() const;
    int max_degree() const;
};

// Two equal groups of n/2 at timepoints (-1, -0.5, 0.5, 1) with serial
// correlation rho: group 1 linear with coefficients (4, 2), group 2 cubic
// with (3, 2, -3, 2).
SimulationScenario default_scenario(int n, double rho, std::uint64_t seed);

// True group mean curves evaluated at the timepoints, one row per group.
Matrix scenario_means(const SimulationScenario& s);

// The generating additive model: one indicator block per group, each at that
// group's own degree.
ModelSpec scenario_spec(const SimulationScenario& s);

// Single-block alternative: the full group-indicator design with one profile
// of the given degree shared by all groups.
ModelSpec shared_profile_spec(const SimulationScenario& s, int degree);

// Same population at total size n, group proportions preserved (largest
// remainder rounding, every group kept nonempty).
SimulationScenario resize_scenario(SimulationScenario s, int n);

// One n x p draw: row = group mean + z L' with L the lower Cholesky factor of
// the covariance and z i.i.d. standard draws of the scenario's law.
// The two-argument form replaces the scenario seed; replications derive their
// streams this way.
Matrix generate(const SimulationScenario& s);
Matrix generate(const SimulationScenario& s, std::uint64_t stream_seed);

// Replications whose fit fails with a library error are dropped and counted;
// more than this share of failures aborts the experiment.
inline constexpr double kMaxFailureShare = 0.01;

// ---- averaged-AIC comparison ------------------------------------------------

struct McAicPoint {
    int n = 0;
    // Averaged AIC of the three candidates fitted to every replication:
    // a shared profile at the smallest group degree (underfits), a shared
    // profile at the largest (overfits), and the generating additive model.
    double aic_shared_min = 0.0;
    double aic_shared_max = 0.0;
    double aic_additive = 0.0;
    double var_shared_min = 0.0;
    double var_shared_max = 0.0;
    double var_additive = 0.0;
    long failures = 0;
    // Per-replication AIC triples, kept only on request; the averages above
    // are their arithmetic means.
    std::vector<std::array<double, 3>> draws;
};

struct McReport {
    std::vector<McAicPoint> points;
    long replications = 0;
    std::uint64_t seed = 0;
    std::optional<double> rho;
    int shared_min_degree = 0;
    int shared_max_degree = 0;
    double runtime_seconds = 0.0;
};

// Replications [rep_begin, rep_end) of the experiment at one sample size.
// Sub-streams depend only on (scenario seed, n, replication index), so any
// split of the range pools back to the full-range averages.
McAicPoint mc_aic_point(const SimulationScenario& s, int n, long rep_begin, long rep_end,
                        bool retain_draws = false);

// n must be even: the averaged-AIC experiment keeps the two-group balance.
McReport mc_aic(const SimulationScenario& s, const std::vector<int>& n_grid, long replications,
                bool retain_draws = false);

// ---- consistency sweep --------------------------------------------------------

struct ConsistencyPoint {
    int n = 0;
    double sigma_error = 0.0;               // mean over replications of max|Sigma_hat - Sigma|
    std::vector<double> coefficient_error;  // mean of max|Theta_hat_i - Theta_i| per block
    long failures = 0;
};

// Estimation error of the generating model along an increasing n grid.
std::vector<ConsistencyPoint> consistency_sweep(const SimulationScenario& s,
                                                const std::vector<int>& n_grid, long replications);

// ---- limiting-distribution check ----------------------------------------------

// Compares the spread of sqrt(n) vec(Theta_hat_i - Theta_i) across
// replications with the limiting covariance built from the TRUE covariance,
// records cross covariances with the other blocks and with Sigma_hat, and
// summarizes the standardized statistic under the true null.
AsymptoticReport normality_check(const SimulationScenario& s, int n, long replications, int block);

}  // namespace agcm
