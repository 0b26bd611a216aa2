#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qwalk/dynamics.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/spectral.hpp"

using qwalk::BoundaryConfig;
using qwalk::Complex;
using qwalk::WallSign;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}
}  // namespace

TEST_CASE("step matrix of the trivial coin is the two-cycle permutation") {
    const auto f = qwalk::clean_field(0.0, 4);
    const auto U = qwalk::build_step_matrix(f, BoundaryConfig{});
    REQUIRE(U.rows() == 8);
    // R components shift one site right, L components one site left.
    for (int m = 0; m < 4; ++m) {
        const int up = (m + 1) % 4, down = (m + 3) % 4;
        CHECK(U(2 * up, 2 * m) == 1.0);
        CHECK(U(2 * down + 1, 2 * m + 1) == 1.0);
    }
    double total = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) total += std::abs(U(i, j));
    CHECK(total == 8.0);  // exactly one unit entry per column

    const auto spec = qwalk::eigenphases(U);
    // Each 4-cycle contributes translation phases {0, pi/2, pi, -pi/2}.
    const auto p = sorted(spec.phases);
    const std::vector<double> want{-kPi / 2, -kPi / 2, 0.0, 0.0,
                                   kPi / 2,  kPi / 2,  kPi, kPi};
    REQUIRE(p.size() == want.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(p[i] == doctest::Approx(want[i]).epsilon(1e-12));
    CHECK(spec.max_residual < 1e-12);
}

TEST_CASE("step matrix action equals the stepping kernel") {
    const int N = 8;
    auto f = qwalk::sample_spatial_field(kPi / 4, kPi / 2, N, 21);
    f.wall = qwalk::Wall{0, WallSign::minus};
    const auto U = qwalk::build_step_matrix(f, BoundaryConfig{});

    // A deterministic, fully populated complex state.
    qwalk::WalkerState st;
    st.N = N;
    st.amp.resize(2 * N);
    qwalk::Rng rng(5);
    double n2 = 0.0;
    for (auto& z : st.amp) {
        z = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        n2 += std::norm(z);
    }
    for (auto& z : st.amp) z /= std::sqrt(n2);

    const auto stepped = qwalk::step(st, f, BoundaryConfig{}, 0);
    for (int i = 0; i < 2 * N; ++i) {
        Complex acc(0, 0);
        for (int j = 0; j < 2 * N; ++j) acc += U(i, j) * st.amp[static_cast<std::size_t>(j)];
        CHECK(std::abs(acc - stepped.amp[static_cast<std::size_t>(i)]) < 1e-13);
    }
}

TEST_CASE("dense assembly respects its capacity cap and field constraints") {
    const auto f = qwalk::clean_field(0.1, 64);
    CHECK_THROWS_AS(qwalk::build_step_matrix(f, BoundaryConfig{}, 16), qwalk::capacity_error);
    const auto tf = qwalk::temporal_field(0.1, 0.2, 8, 1);
    CHECK_THROWS_AS(qwalk::build_step_matrix(tf, BoundaryConfig{}), std::invalid_argument);
    CHECK_THROWS_AS(
        qwalk::build_step_matrix(f, BoundaryConfig{qwalk::Topology::open_guard}),
        std::invalid_argument);
}

TEST_CASE("eigenphases rejects non-orthogonal input") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
    A(0, 1) = 0.3;
    CHECK_THROWS_AS(qwalk::eigenphases(A), std::invalid_argument);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(5, 5);
    CHECK_THROWS_AS(qwalk::eigenphases(B), std::invalid_argument);
}

TEST_CASE("uniform-walk spectrum fills the bands and leaves the gaps empty") {
    const auto f = qwalk::clean_field(kPi / 4, 100);
    const auto spec = qwalk::eigenphases(qwalk::build_step_matrix(f, BoundaryConfig{}));
    REQUIRE(spec.phases.size() == 200);
    for (double w : spec.phases) {
        const double a = std::abs(w);
        CHECK(a >= kPi / 4 - 1e-9);          // gap around 0 is empty
        CHECK(a <= 3 * kPi / 4 + 1e-9);      // gap around pi is empty
    }
    // Every phase obeys the dispersion relation for some wavenumber
    // (k = 0 sits exactly on the band edge, so leave eigensolver headroom).
    for (double w : spec.phases)
        CHECK(std::abs(std::cos(w)) <= std::cos(kPi / 4) + 1e-10);
}

TEST_CASE("reflecting coin pins doubly degenerate modes at 0 and pi") {
    auto f = qwalk::clean_field(kPi / 4, 100);
    f.wall = qwalk::Wall{0, WallSign::minus};
    const auto spec = qwalk::eigenphases(qwalk::build_step_matrix(f, BoundaryConfig{}));
    const auto ec = qwalk::detect_edge_states(spec, 1e-8);
    CHECK(ec.at_zero == 2);
    CHECK(ec.at_pi == 2);

    f.wall = qwalk::Wall{0, WallSign::plus};
    const auto spec2 = qwalk::eigenphases(qwalk::build_step_matrix(f, BoundaryConfig{}));
    const auto ec2 = qwalk::detect_edge_states(spec2, 1e-8);
    CHECK(ec2.at_zero == 0);
    CHECK(ec2.at_pi == 0);
}

TEST_CASE("edge detection tolerances") {
    CHECK(qwalk::default_edge_tol(500, false) == 1e-8);
    CHECK(qwalk::default_edge_tol(50, true) ==
          doctest::Approx(0.1 * 2 * kPi / 100.0).epsilon(1e-12));
    CHECK(qwalk::default_edge_tol(1 << 30, true) == 1e-8);
    qwalk::Spectrum s;
    CHECK_THROWS_AS(qwalk::detect_edge_states(s, 0.0), std::invalid_argument);
}

TEST_CASE("disordered spectra keep the quadruplet symmetry; a perturbed one fails") {
    const auto f = qwalk::sample_spatial_field(kPi / 4, kPi / 4, 64, 314);
    auto spec = qwalk::eigenphases(qwalk::build_step_matrix(f, BoundaryConfig{}));
    const auto rep = qwalk::check_quadruplet_symmetry(spec, 1e-9);
    CHECK(rep.passed);
    CHECK(rep.worst_negation < 1e-9);
    CHECK(rep.worst_half_turn < 1e-9);

    spec.phases[5] += 1e-6;  // break the symmetry by hand
    const auto bad = qwalk::check_quadruplet_symmetry(spec, 1e-9);
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst_negation > 1e-8);
}

TEST_CASE("band-structure density evaluates, vanishes in gaps, and normalizes") {
    CHECK(qwalk::clean_dos(kPi / 2, kPi / 4) ==
          doctest::Approx(std::sqrt(2.0) / (2 * kPi)).epsilon(1e-12));
    CHECK(qwalk::clean_dos(0.1, kPi / 4) == 0.0);
    CHECK(qwalk::clean_dos(kPi - 0.1, kPi / 4) == 0.0);
    CHECK(std::isinf(qwalk::clean_dos(kPi / 4, kPi / 4)));

    // Midpoint integral over (-pi, pi]; the edge singularities are
    // integrable, so a fine grid converges to 1.
    const int G = 400000;
    double sum = 0.0;
    for (int i = 0; i < G; ++i) {
        const double w = -kPi + (i + 0.5) * 2 * kPi / G;
        sum += qwalk::clean_dos(w, kPi / 4);
    }
    sum *= 2 * kPi / G;
    CHECK(sum == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("ensemble histogram matches the band density in the clean limit") {
    qwalk::DosConfig cfg;
    cfg.theta_bar = kPi / 4;
    cfg.dtheta_s = 0.0;
    cfg.N = 500;
    cfg.samples = 1;
    cfg.bins = 16;
    const auto h = qwalk::dos_ensemble(cfg);
    CHECK(h.integral() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(h.kept == 1000);

    // Away from the band edges the binned density tracks the analytic
    // bin average within 3% (level quantization dominates at N = 500).
    const double edges[] = {kPi / 4, 3 * kPi / 4, -kPi / 4, -3 * kPi / 4};
    const int sub = 400;
    for (int b = 0; b < cfg.bins; ++b) {
        const double lo = h.edges[static_cast<std::size_t>(b)];
        const double hi = h.edges[static_cast<std::size_t>(b) + 1];
        const double mid = 0.5 * (lo + hi);
        double gap = 1e9;
        for (double e : edges) gap = std::min(gap, std::abs(mid - e));
        if (gap < 0.2) continue;
        double avg = 0.0;
        for (int i = 0; i < sub; ++i)
            avg += qwalk::clean_dos(lo + (i + 0.5) * (hi - lo) / sub, kPi / 4);
        avg /= sub;
        const double got = h.density[static_cast<std::size_t>(b)];
        if (avg < 1e-9)
            CHECK(got == 0.0);
        else
            CHECK(std::abs(got - avg) / avg < 0.03);
    }
}

TEST_CASE("folded ensemble histogram equals the dense signed route") {
    qwalk::DosConfig cfg;
    cfg.theta_bar = kPi / 4;
    cfg.dtheta_s = kPi / 4;
    cfg.N = 64;
    cfg.samples = 3;
    cfg.bins = 32;
    cfg.seed = 2025;
    cfg.wall = WallSign::minus;
    const auto h = qwalk::dos_ensemble(cfg);

    // Rebuild the same realizations and histogram the signed eigenphases.
    std::vector<double> ref(static_cast<std::size_t>(cfg.bins), 0.0);
    const double width = 2 * kPi / cfg.bins;
    long long kept = 0;
    int at_zero = 0, at_pi = 0;
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
        auto f = qwalk::sample_spatial_field(cfg.theta_bar, cfg.dtheta_s, cfg.N,
                                             qwalk::stream_seed(cfg.seed, i));
        f.wall = qwalk::Wall{0, WallSign::minus};
        const auto spec = qwalk::eigenphases(qwalk::build_step_matrix(f, BoundaryConfig{}));
        for (double w : spec.phases) {
            if (std::abs(std::cos(w) - 1.0) < 1e-12) {
                ++at_zero;
                continue;
            }
            if (std::abs(std::cos(w) + 1.0) < 1e-12) {
                ++at_pi;
                continue;
            }
            int b = static_cast<int>((w + kPi) / width);
            b = std::min(std::max(b, 0), cfg.bins - 1);
            ref[static_cast<std::size_t>(b)] += 1.0;
            ++kept;
        }
    }
    CHECK(kept == static_cast<long long>(h.kept));
    CHECK(at_zero == h.boundary_modes.at_zero);
    CHECK(at_pi == h.boundary_modes.at_pi);
    CHECK(h.boundary_modes.at_zero == 2 * static_cast<int>(cfg.samples));
    CHECK(h.boundary_modes.at_pi == 2 * static_cast<int>(cfg.samples));
    // Same counts bin by bin (the +-pair structure is exact, so the mirror
    // split reproduces the signed histogram; allow one straddling level).
    const double unit = 1.0 / (static_cast<double>(kept) * width);
    for (int b = 0; b < cfg.bins; ++b)
        CHECK(std::abs(h.density[static_cast<std::size_t>(b)] -
                       ref[static_cast<std::size_t>(b)] * unit) <= 1.001 * unit);
}

TEST_CASE("histogram helpers: integral, peak lookup, determinism") {
    qwalk::DosConfig cfg;
    cfg.theta_bar = kPi / 4;
    cfg.dtheta_s = kPi;
    cfg.N = 64;
    cfg.samples = 4;
    cfg.bins = 64;
    cfg.seed = 31;
    const auto a = qwalk::dos_ensemble(cfg);
    const auto b = qwalk::dos_ensemble(cfg);
    CHECK(a.density == b.density);
    CHECK(a.integral() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.peak_density_near(kPi / 2, 0.3) > 0.0);
    CHECK(a.bin_width() == doctest::Approx(2 * kPi / 64).epsilon(1e-14));

    cfg.bins = 1;
    CHECK_THROWS_AS(qwalk::dos_ensemble(cfg), std::invalid_argument);
    cfg.bins = 64;
    cfg.samples = 0;
    CHECK_THROWS_AS(qwalk::dos_ensemble(cfg), std::invalid_argument);
}

TEST_CASE("ensemble histogram is invariant under the worker count") {
    qwalk::DosConfig cfg;
    cfg.theta_bar = kPi / 4;
    cfg.dtheta_s = kPi / 2;
    cfg.N = 48;
    cfg.samples = 10;
    cfg.bins = 40;
    cfg.seed = 8;
    cfg.workers = 1;
    const auto w1 = qwalk::dos_ensemble(cfg);
    cfg.workers = 4;
    const auto w4 = qwalk::dos_ensemble(cfg);
    CHECK(w1.density == w4.density);
    CHECK(w1.kept == w4.kept);
}
