#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "qwalk/errors.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/scaling.hpp"
#include "qwalk/spectral.hpp"

using qwalk::FitPoint;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}
}  // namespace

TEST_CASE("model evaluations: frozen values and domain") {
    // Values pinned from an independent high-level-language evaluation.
    CHECK(qwalk::eval_dos_model(0.01, 0.2, 0.5) ==
          doctest::Approx(0.26893423137308775).epsilon(1e-13));
    CHECK(qwalk::eval_xi_model(1e-6, 5.0, 0.3) ==
          doctest::Approx(75.09741681145104).epsilon(1e-13));

    CHECK_THROWS_AS(qwalk::eval_dos_model(2.0, 1.0, 0.6), std::domain_error);
    CHECK_THROWS_AS(qwalk::eval_xi_model(1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(qwalk::eval_xi_model(0.0, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(qwalk::eval_dos_model(-0.1, 1.0, 0.5), std::domain_error);
}

TEST_CASE("length fit recovers exact model parameters and ignores out-of-window points") {
    const double xi0 = 5.0, tau = 0.3;
    std::vector<FitPoint> pts;
    for (double d : log_grid(1e-11, 1e-3, 20))
        pts.push_back({d, qwalk::eval_xi_model(d, xi0, tau), 0.0});
    const auto fit = qwalk::fit_xi(pts);
    CHECK(fit.amplitude == doctest::Approx(xi0).epsilon(1e-6));
    CHECK(fit.tau == doctest::Approx(tau).epsilon(1e-6));
    CHECK(fit.points == 20);
    CHECK(fit.iterations == 0);
    CHECK(fit.r_squared > 1.0 - 1e-12);
    CHECK(fit.residual_norm < 1e-8);

    auto junk = pts;
    junk.push_back({0.5, -999.0, 0.0});  // outside the window: must not matter
    const auto fit2 = qwalk::fit_xi(junk);
    CHECK(fit2.amplitude == fit.amplitude);
    CHECK(fit2.tau == fit.tau);
    CHECK(fit2.points == 20);

    // Uniform explicit error bars rescale all weights equally: same answer.
    auto werr = pts;
    for (auto& p : werr) p.stderr_ = 0.1;
    const auto fit3 = qwalk::fit_xi(werr);
    CHECK(fit3.amplitude == doctest::Approx(fit.amplitude).epsilon(1e-12));
    CHECK(fit3.tau == doctest::Approx(fit.tau).epsilon(1e-12));
}

TEST_CASE("length fit tolerates mild noise") {
    const double xi0 = 5.0, tau = 0.3;
    qwalk::Rng rng(2024);
    std::vector<FitPoint> pts;
    for (double d : log_grid(1e-11, 1e-3, 25)) {
        const double v = qwalk::eval_xi_model(d, xi0, tau);
        pts.push_back({d, v * (1.0 + 0.005 * rng.uniform(-1.0, 1.0)), 0.0});
    }
    const auto fit = qwalk::fit_xi(pts);
    CHECK(fit.amplitude == doctest::Approx(xi0).epsilon(0.02));
    CHECK(fit.tau == doctest::Approx(tau).epsilon(0.10));
    CHECK(fit.r_squared > 0.999);
}

TEST_CASE("length fit rejects degenerate or non-divergent input") {
    std::vector<FitPoint> same;
    for (int i = 0; i < 5; ++i) same.push_back({1e-6, 10.0 + i, 0.0});
    CHECK_THROWS_AS(qwalk::fit_xi(same), qwalk::fit_error);

    std::vector<FitPoint> few{{1e-6, 10.0, 0.0}, {1e-5, 9.0, 0.0}};
    CHECK_THROWS_AS(qwalk::fit_xi(few), qwalk::fit_error);

    std::vector<FitPoint> inf_pts;
    for (double d : log_grid(1e-9, 1e-4, 5)) inf_pts.push_back({d, 10.0, 0.0});
    inf_pts[2].value = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(qwalk::fit_xi(inf_pts), qwalk::fit_error);

    // Values growing with delta: the divergence points the wrong way.
    std::vector<FitPoint> rising;
    for (double d : log_grid(1e-9, 1e-4, 8))
        rising.push_back({d, 100.0 + 2.0 * std::log(d), 0.0});
    CHECK_THROWS_AS(qwalk::fit_xi(rising), qwalk::fit_error);
}

TEST_CASE("density fit recovers exact model parameters") {
    const double rho0 = 0.2, tau = 0.5;
    std::vector<FitPoint> pts;
    for (double d : log_grid(4e-4, 9e-2, 20))
        pts.push_back({d, qwalk::eval_dos_model(d, rho0, tau), 0.0});
    const auto fit = qwalk::fit_dos(pts);
    CHECK(fit.amplitude == doctest::Approx(rho0).epsilon(1e-6));
    CHECK(fit.tau == doctest::Approx(tau).epsilon(1e-6));
    CHECK(fit.points == 20);
    CHECK(fit.iterations >= 1);
    CHECK(fit.iterations <= 200);
    CHECK(fit.residual_norm < 1e-7);
    CHECK(fit.r_squared > 1.0 - 1e-10);

    // The optimizer records only accepted steps: strictly decreasing cost.
    REQUIRE(fit.residual_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.residual_trace.size(); ++i)
        CHECK(fit.residual_trace[i] < fit.residual_trace[i - 1]);
}

TEST_CASE("density fit tolerates mild noise") {
    const double rho0 = 0.2, tau = 0.5;
    qwalk::Rng rng(77);
    std::vector<FitPoint> pts;
    for (double d : log_grid(4e-4, 9e-2, 25)) {
        const double v = qwalk::eval_dos_model(d, rho0, tau);
        pts.push_back({d, v * (1.0 + 0.02 * rng.uniform(-1.0, 1.0)), 0.0});
    }
    const auto fit = qwalk::fit_dos(pts);
    CHECK(fit.amplitude == doctest::Approx(rho0).epsilon(0.10));
    CHECK(fit.tau == doctest::Approx(tau).epsilon(0.10));
}

TEST_CASE("density fit flags non-divergent data with a large residual") {
    // A flat band-center density (the uniform-walk value) has no log-cubed
    // divergence; the best achievable fit still misses badly.
    std::vector<FitPoint> pts;
    for (double d : log_grid(4e-4, 9e-2, 15))
        pts.push_back({d, qwalk::clean_dos(kPi / 2 - d, kPi / 4), 0.0});
    const auto fit = qwalk::fit_dos(pts);
    CHECK(fit.residual_norm > 0.1);
    CHECK(fit.r_squared < 0.9);
}

TEST_CASE("density fit input validation") {
    std::vector<FitPoint> pts;
    for (double d : log_grid(4e-4, 9e-2, 10))
        pts.push_back({d, qwalk::eval_dos_model(d, 0.2, 0.5), 0.0});

    auto bad = pts;
    bad[3].value = -1.0;
    CHECK_THROWS_AS(qwalk::fit_dos(bad), qwalk::fit_error);
    CHECK_THROWS_AS(qwalk::fit_dos(pts, 0.0), qwalk::fit_error);

    std::vector<FitPoint> few{{1e-3, 10.0, 0.0}, {1e-2, 1.0, 0.0}};
    CHECK_THROWS_AS(qwalk::fit_dos(few), qwalk::fit_error);
}

TEST_CASE("rescaled curves land on the master curve") {
    std::vector<std::vector<FitPoint>> curves;
    std::vector<qwalk::ScalingFit> fits;
    const double params[][2] = {{5.0, 0.3}, {0.8, 2.5}};
    for (const auto& pr : params) {
        std::vector<FitPoint> pts;
        for (double d : log_grid(1e-11, 1e-3, 15))
            pts.push_back({d, qwalk::eval_xi_model(d, pr[0], pr[1]), 0.0});
        fits.push_back(qwalk::fit_xi(pts));
        curves.push_back(std::move(pts));
    }
    const auto col = qwalk::collapse(curves, fits);
    CHECK(col.points.size() == 30);
    CHECK(col.max_abs_log10_scatter < 1e-12);
    for (const auto& p : col.points) {
        CHECK(p.x > 0.0);
        CHECK(p.x < 1.0);
    }

    fits.pop_back();
    CHECK_THROWS_AS(qwalk::collapse(curves, fits), std::invalid_argument);
    fits.push_back(qwalk::ScalingFit{});  // amplitude/tau default to zero
    CHECK_THROWS_AS(qwalk::collapse(curves, fits), std::invalid_argument);
}
