#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "qwalk/dynamics.hpp"
#include "qwalk/rng.hpp"

using qwalk::DisorderMode;
using qwalk::TrajectoryConfig;
using qwalk::WallSign;

namespace {
constexpr double kPi = 3.14159265358979323846;

TrajectoryConfig clean_cfg(std::uint64_t steps) {
    TrajectoryConfig c;
    c.mode = DisorderMode::clean;
    c.theta_bar = kPi / 4;
    c.steps = steps;
    return c;
}
}  // namespace

TEST_CASE("observables on hand-checked early steps") {
    auto tr = qwalk::run_trajectory(clean_cfg(3));
    REQUIRE(tr.times == std::vector<std::uint64_t>{1, 2, 3});
    // After one step all probability sits at n = +-1.
    CHECK(tr.survival[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(tr.variance[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr.variance[1] == doctest::Approx(2.0).epsilon(1e-12));

    double total = 0.0;
    for (double p : tr.final_distribution) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("recording times: dense prefix, log tail, explicit stride") {
    auto r5 = qwalk::recording_times(5, 0);
    CHECK(r5 == std::vector<std::uint64_t>{1, 2, 3, 4, 5});

    auto r100 = qwalk::recording_times(100, 0);
    CHECK(r100.size() == 100);
    CHECK(r100.front() == 1);
    CHECK(r100.back() == 100);

    auto r2000 = qwalk::recording_times(2000, 0);
    CHECK(r2000.front() == 1);
    CHECK(r2000.back() == 2000);
    CHECK(r2000[99] == 100);
    for (std::size_t i = 1; i < r2000.size(); ++i) CHECK(r2000[i] > r2000[i - 1]);
    CHECK(r2000.size() > 110);   // log tail exists
    CHECK(r2000.size() < 400);   // ... and is sparse

    auto rs = qwalk::recording_times(30, 7);
    CHECK(rs == std::vector<std::uint64_t>{7, 14, 21, 28, 30});
    auto rs2 = qwalk::recording_times(100, 10);
    CHECK(rs2.size() == 10);
    CHECK(rs2.back() == 100);
}

TEST_CASE("trajectory validates its lattice size") {
    CHECK_THROWS_AS(qwalk::run_trajectory(clean_cfg(0)), std::invalid_argument);
    auto c = clean_cfg(100);
    c.N = 100;  // needs 204
    CHECK_THROWS_AS(qwalk::run_trajectory(c), std::invalid_argument);
    c.N = 0;
    CHECK(qwalk::run_trajectory(c).N == 204);
}

TEST_CASE("single-sample ensemble equals the matching trajectory bitwise") {
    TrajectoryConfig c;
    c.mode = DisorderMode::spatial;
    c.theta_bar = kPi / 4;
    c.dtheta = kPi / 2;
    c.steps = 60;
    c.seed = 4242;
    c.wall = WallSign::minus;

    const auto ens = qwalk::run_ensemble(c, 1, 1);
    auto solo = c;
    solo.seed = qwalk::stream_seed(c.seed, 0);
    solo.N = ens.N;
    const auto tr = qwalk::run_trajectory(solo);

    CHECK(ens.survival_mean == tr.survival);
    CHECK(ens.variance_mean == tr.variance);
    CHECK(ens.distribution_mean == tr.final_distribution);
    for (double s : ens.survival_stderr) CHECK(s == 0.0);
}

TEST_CASE("clean ensembles have zero spread") {
    // Identical samples: the spread is pure cancellation noise, bounded by
    // ~sqrt(eps) relative to the observable scale (variance here is ~500).
    auto c = clean_cfg(40);
    const auto ens = qwalk::run_ensemble(c, 4, 1);
    for (double s : ens.survival_stderr) CHECK(s < 1e-7);
    for (double s : ens.variance_stderr) CHECK(s < 1e-4);
}

TEST_CASE("ensemble results do not depend on the worker count") {
    TrajectoryConfig c;
    c.mode = DisorderMode::spatial;
    c.theta_bar = kPi / 4;
    c.dtheta = kPi;
    c.steps = 50;
    c.seed = 777;
    const auto w1 = qwalk::run_ensemble(c, 20, 1);
    const auto w3 = qwalk::run_ensemble(c, 20, 3);
    const auto w8 = qwalk::run_ensemble(c, 20, 8);
    CHECK(w1.survival_mean == w3.survival_mean);
    CHECK(w1.survival_stderr == w3.survival_stderr);
    CHECK(w1.variance_mean == w3.variance_mean);
    CHECK(w1.distribution_mean == w3.distribution_mean);
    CHECK(w1.distribution_stderr == w3.distribution_stderr);
    CHECK(w1.survival_mean == w8.survival_mean);
    CHECK(w1.distribution_stderr == w8.distribution_stderr);
}

TEST_CASE("ensemble runs are reproducible") {
    TrajectoryConfig c;
    c.mode = DisorderMode::temporal;
    c.theta_bar = kPi / 4;
    c.dtheta = kPi / 4;
    c.steps = 64;
    c.seed = 99;
    c.wall = WallSign::minus;
    const auto a = qwalk::run_ensemble(c, 6, 0);
    const auto b = qwalk::run_ensemble(c, 6, 0);
    CHECK(a.survival_mean == b.survival_mean);
    CHECK(a.distribution_mean == b.distribution_mean);
}

TEST_CASE("temporal trajectory matches an explicit step-by-step evolution") {
    TrajectoryConfig c;
    c.mode = DisorderMode::temporal;
    c.theta_bar = kPi / 4;
    c.dtheta = kPi / 2;
    c.steps = 24;
    c.seed = 31337;
    c.wall = WallSign::minus;
    const auto tr = qwalk::run_trajectory(c);

    auto field = qwalk::temporal_field(c.theta_bar, c.dtheta, tr.N, c.seed);
    field.wall = qwalk::Wall{0, WallSign::minus};
    auto st = qwalk::initial_state(tr.N);
    for (std::uint64_t t = 0; t < c.steps; ++t)
        st = qwalk::step(st, field, qwalk::BoundaryConfig{}, t);
    CHECK(tr.final_distribution == qwalk::probability_distribution(st));
}

TEST_CASE("clean walk is ballistic; spatial disorder is clearly slower") {
    auto c = clean_cfg(500);
    const auto clean = qwalk::run_ensemble(c, 1, 1);
    const double s2 = qwalk::loglog_slope(clean.times, clean.variance_mean, 50, 500);
    CHECK(s2 == doctest::Approx(2.0).epsilon(0.03));

    TrajectoryConfig d;
    d.mode = DisorderMode::spatial;
    d.theta_bar = kPi / 4;
    d.dtheta = kPi / 4;
    d.steps = 500;
    d.seed = 2718;
    const auto dis = qwalk::run_ensemble(d, 40, 0);
    const double sd = qwalk::loglog_slope(dis.times, dis.variance_mean, 50, 500);
    CHECK(sd < 1.5);
    CHECK(sd > -0.2);
}

TEST_CASE("loglog_slope recovers exact power laws and validates input") {
    std::vector<std::uint64_t> x;
    std::vector<double> y;
    for (std::uint64_t t = 1; t <= 200; ++t) {
        x.push_back(t);
        y.push_back(3.0 * std::pow(static_cast<double>(t), 2.5));
    }
    CHECK(qwalk::loglog_slope(x, y, 1, 200) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(qwalk::loglog_slope(x, y, 50, 100) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(qwalk::loglog_slope(x, y, 1000, 2000), std::invalid_argument);
}

TEST_CASE("excess kurtosis: zero for a discrete Gaussian, -6/5 for uniform") {
    std::vector<double> gauss(101);
    const double sigma = 6.0;
    for (std::size_t m = 0; m < gauss.size(); ++m) {
        const double d = static_cast<double>(m) - 50.0;
        gauss[m] = std::exp(-d * d / (2 * sigma * sigma));
    }
    CHECK(std::abs(qwalk::excess_kurtosis(gauss)) < 1e-6);

    std::vector<double> uni(101, 1.0);
    // Discrete uniform on k points: excess kurtosis -6(k^2+1)/(5(k^2-1)).
    const double k2 = 101.0 * 101.0;
    CHECK(qwalk::excess_kurtosis(uni) ==
          doctest::Approx(-6.0 * (k2 + 1) / (5.0 * (k2 - 1))).epsilon(1e-12));

    CHECK_THROWS_AS(qwalk::excess_kurtosis(std::vector<double>(5, 0.0)),
                    std::invalid_argument);
}
