#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "qwalk/core.hpp"

namespace qwalk {

// P_n = |psi_{n,R}|^2 + |psi_{n,L}|^2 for every site, in site order
// n = -N/2 .. N/2-1.
std::vector<double> probability_distribution(const WalkerState& state);

// P_n at the origin.
double survival_probability(const WalkerState& state);

// Var(n) = <n^2> - <n>^2 under the distribution P_n.
double position_variance(const WalkerState& state);

struct TrajectoryConfig {
    DisorderMode mode = DisorderMode::clean;
    double theta_bar = 0.0;
    double dtheta = 0.0;            // disorder width (spatial or temporal)
    std::uint64_t steps = 0;
    int N = 0;                      // 0 -> auto: 2*steps + 4 (front never wraps)
    std::optional<WallSign> wall;   // reflecting coin at the origin
    std::uint64_t seed = 0;
    std::uint64_t stride = 0;       // 0 -> default recording rule
    bool record_final_distribution = true;
};

struct Trajectory {
    std::vector<std::uint64_t> times;     // recorded step indices (ascending, last = steps)
    std::vector<double> survival;         // P_0 at each recorded time
    std::vector<double> variance;         // Var(n) at each recorded time
    std::vector<double> final_distribution;  // P_n at the last step (optional)
    int N = 0;
    TrajectoryConfig config;
};

// Recording times: every step while t <= 100 (or the explicit stride), then
// logarithmically spaced (about 32 marks per decade), always including the
// final step.
std::vector<std::uint64_t> recording_times(std::uint64_t steps, std::uint64_t stride);

// Evolve one disorder realization and record observables.  Deterministic
// under the config seed.
Trajectory run_trajectory(const TrajectoryConfig& config);

struct EnsembleResult {
    std::uint64_t samples = 0;
    std::vector<std::uint64_t> times;
    std::vector<double> survival_mean, survival_stderr;
    std::vector<double> variance_mean, variance_stderr;   // mean of per-sample variances
    std::vector<double> distribution_mean, distribution_stderr;  // P_n at final step
    int N = 0;
    TrajectoryConfig config;
};

// Average `samples` independent realizations; sample i uses
// stream_seed(config.seed, i).  Accumulation is blocked and merged in index
// order, so the result is identical for any worker count.
EnsembleResult run_ensemble(const TrajectoryConfig& config, std::uint64_t samples,
                            int workers = 0);

// Least-squares slope of log(y) against log(x) restricted to x in [lo, hi];
// the growth-exponent estimate used for ballistic/diffusive classification.
double loglog_slope(const std::vector<std::uint64_t>& x, const std::vector<double>& y,
                    double lo, double hi);

// Excess kurtosis of a probability distribution over sites (0 for a Gaussian).
double excess_kurtosis(const std::vector<double>& P);

}  // namespace qwalk
