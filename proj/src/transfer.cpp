#include "qwalk/transfer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qwalk/errors.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

QuasiEnergy QuasiEnergy::from_omega(double omega) {
    return {std::cos(omega), std::sin(omega)};
}

QuasiEnergy QuasiEnergy::near_half_pi(double delta) {
    // omega = pi/2 - delta: cos = sin(delta), sin = cos(delta), exact in delta.
    return {std::sin(delta), std::cos(delta)};
}

TransferMatrix transfer_matrix(double theta, const QuasiEnergy& omega) {
    const double c = std::cos(theta);
    if (std::abs(c) <= 1e-12)
        throw singular_coin_error("transfer matrix singular at cos(theta) = 0");
    const double sec = 1.0 / c;
    const double tn = std::sin(theta) * sec;
    return {Complex(omega.c, -omega.s) * sec, Complex(-tn, 0.0),
            Complex(-tn, 0.0), Complex(omega.c, omega.s) * sec};
}

TransferMatrix transfer_matrix(double theta, double omega) {
    return transfer_matrix(theta, QuasiEnergy::from_omega(omega));
}

namespace {

struct Propagation {
    long double log_norm = 0.0L;       // accumulated log growth
    std::vector<double> block_gamma;   // per-block growth rates
    std::uint64_t resampled = 0;
    bool interval_reduced = false;
};

// Shared driver: propagates a unit vector through `sites` random transfer
// matrices, renormalizing on a fixed cadence, and records block statistics.
Propagation propagate(const LyapunovConfig& cfg) {
    if (cfg.sites < 10000)
        throw std::invalid_argument("chain too short for a stable growth estimate (need >= 1e4)");
    if (!(cfg.dtheta_s >= 0.0)) throw std::invalid_argument("disorder width must be >= 0");
    if (cfg.renorm_interval < 1 || cfg.blocks < 2)
        throw std::invalid_argument("bad renormalization or block configuration");
    if (cfg.dtheta_s == 0.0 && std::abs(std::cos(cfg.theta_bar)) <= 1e-12)
        throw singular_coin_error("clean angle pins cos(theta) = 0");

    Rng rng(cfg.seed);
    const Complex em(cfg.omega.c, -cfg.omega.s);  // e^{-i omega}
    const Complex ep(cfg.omega.c, +cfg.omega.s);  // e^{+i omega}

    Complex a(1.0, 0.0), b(0.0, 0.0);
    Propagation out;
    out.block_gamma.reserve(static_cast<std::size_t>(cfg.blocks));

    const std::uint64_t block_len = cfg.sites / cfg.blocks;
    if (block_len < 1) throw std::invalid_argument("more error blocks than sites");
    std::uint64_t next_block_end = block_len;
    long double block_start_log = 0.0L;

    int interval = cfg.renorm_interval;
    int since_renorm = 0;
    // Component magnitudes above this trigger an immediate renormalization;
    // far below overflow, far above any legitimate per-interval growth.
    constexpr double kGuard = 1e140;

    auto renorm = [&]() {
        const double n2 = std::norm(a) + std::norm(b);
        const double n = std::sqrt(n2);
        out.log_norm += std::log(static_cast<long double>(n));
        a /= n;
        b /= n;
        since_renorm = 0;
    };

    for (std::uint64_t i = 0; i < cfg.sites; ++i) {
        double th = rng.angle(cfg.theta_bar, cfg.dtheta_s);
        int attempts = 0;
        while (std::abs(std::cos(th)) < 1e-12) {
            th = rng.angle(cfg.theta_bar, cfg.dtheta_s);
            ++out.resampled;
            if (++attempts > 100)
                throw numerical_error("coin angle interval is stuck at the singular point");
        }
        const double sec = 1.0 / std::cos(th);
        const double tn = std::sin(th) * sec;
        const Complex na = em * sec * a - tn * b;
        const Complex nb = ep * sec * b - tn * a;
        a = na;
        b = nb;
        ++since_renorm;

        const bool overflow_risk =
            std::abs(a.real()) + std::abs(a.imag()) + std::abs(b.real()) + std::abs(b.imag()) >
            kGuard;
        if (overflow_risk && interval > 1) {
            interval = std::max(1, interval / 2);
            out.interval_reduced = true;
        }
        if (since_renorm >= interval || overflow_risk) renorm();

        if (i + 1 == next_block_end) {
            // Snapshot the exact log including the pending partial interval.
            const double pend = std::sqrt(std::norm(a) + std::norm(b));
            const long double log_now = out.log_norm + std::log(static_cast<long double>(pend));
            out.block_gamma.push_back(
                static_cast<double>((log_now - block_start_log) / block_len));
            block_start_log = log_now;
            next_block_end += block_len;
        }
    }
    renorm();
    return out;
}

}  // namespace

LyapunovResult lyapunov(const LyapunovConfig& cfg) {
    Propagation p = propagate(cfg);
    LyapunovResult res;
    res.sites = cfg.sites;
    res.resampled = p.resampled;
    res.interval_reduced = p.interval_reduced;
    res.gamma = static_cast<double>(p.log_norm / static_cast<long double>(cfg.sites));
    res.xi = res.gamma != 0.0 ? 1.0 / res.gamma : std::numeric_limits<double>::infinity();

    const std::size_t nb = p.block_gamma.size();
    double mean = 0.0;
    for (double g : p.block_gamma) mean += g;
    mean /= static_cast<double>(nb);
    double var = 0.0;
    for (double g : p.block_gamma) var += (g - mean) * (g - mean);
    var /= static_cast<double>(nb - 1);
    res.stderr_ = std::sqrt(var / static_cast<double>(nb));
    return res;
}

LyapunovPair lyapunov_pair(const LyapunovConfig& cfg) {
    if (cfg.sites < 10000)
        throw std::invalid_argument("chain too short for a stable growth estimate (need >= 1e4)");
    Rng rng(cfg.seed);
    const Complex em(cfg.omega.c, -cfg.omega.s), ep(cfg.omega.c, +cfg.omega.s);

    // Orthonormal 2-frame, Gram-Schmidt at every renormalization; the log of
    // each diagonal accumulates one exponent.
    Complex a1(1, 0), b1(0, 0), a2(0, 0), b2(1, 0);
    long double l1 = 0.0L, l2 = 0.0L;
    const int interval = cfg.renorm_interval;
    int since = 0;

    auto orthonormalize = [&]() {
        const double n1 = std::sqrt(std::norm(a1) + std::norm(b1));
        l1 += std::log(static_cast<long double>(n1));
        a1 /= n1; b1 /= n1;
        const Complex proj = std::conj(a1) * a2 + std::conj(b1) * b2;
        a2 -= proj * a1; b2 -= proj * b1;
        const double n2 = std::sqrt(std::norm(a2) + std::norm(b2));
        l2 += std::log(static_cast<long double>(n2));
        a2 /= n2; b2 /= n2;
        since = 0;
    };

    for (std::uint64_t i = 0; i < cfg.sites; ++i) {
        double th = rng.angle(cfg.theta_bar, cfg.dtheta_s);
        while (std::abs(std::cos(th)) < 1e-12) th = rng.angle(cfg.theta_bar, cfg.dtheta_s);
        const double sec = 1.0 / std::cos(th);
        const double tn = std::sin(th) * sec;
        const Complex na1 = em * sec * a1 - tn * b1, nb1 = ep * sec * b1 - tn * a1;
        const Complex na2 = em * sec * a2 - tn * b2, nb2 = ep * sec * b2 - tn * a2;
        a1 = na1; b1 = nb1; a2 = na2; b2 = nb2;
        if (++since >= interval ||
            std::abs(a1.real()) + std::abs(a1.imag()) > 1e140)
            orthonormalize();
    }
    orthonormalize();

    LyapunovPair pair;
    pair.gamma_plus = static_cast<double>(l1 / static_cast<long double>(cfg.sites));
    pair.gamma_minus = static_cast<double>(l2 / static_cast<long double>(cfg.sites));
    return pair;
}

std::vector<XiPoint> xi_vs_energy(const std::vector<double>& deltas, double theta_bar,
                                  double dtheta_s, std::uint64_t sites, std::uint64_t seed) {
    for (double d : deltas)
        if (!(d >= 1e-15) || !(d <= 1e-1))
            throw std::invalid_argument(
                "energy offsets must lie in [1e-15, 1e-1]: smaller is below double "
                "resolution at the band-center point");
    std::vector<XiPoint> out;
    out.reserve(deltas.size());
    for (double d : deltas) {
        LyapunovConfig cfg;
        cfg.omega = QuasiEnergy::near_half_pi(d);
        cfg.theta_bar = theta_bar;
        cfg.dtheta_s = dtheta_s;
        cfg.sites = sites;
        cfg.seed = seed;  // matched disorder across the curve
        const LyapunovResult r = lyapunov(cfg);
        XiPoint pt;
        pt.delta = d;
        pt.gamma = r.gamma;
        pt.xi = r.xi;
        pt.stderr_ = r.stderr_;
        out.push_back(pt);
    }
    return out;
}

}  // namespace qwalk
