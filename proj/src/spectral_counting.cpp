#include "qwalk/spectral_counting.hpp"

#include <cmath>
#include <stdexcept>

#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

BandMatrix fold_band(const CoinField& field) {
    if (field.mode == DisorderMode::temporal)
        throw std::invalid_argument("band fold is defined for static coin fields");
    const int N = field.N;
    BandMatrix H;
    H.dim = 2 * N;
    H.d1.assign(static_cast<std::size_t>(H.dim - 1), 0.0);
    H.d2.assign(static_cast<std::size_t>(H.dim - 2), 0.0);

    for (int m = 0; m < N; ++m) {
        CoinMatrix cm = field.mode == DisorderMode::spatial
                            ? make_coin(field.theta[static_cast<std::size_t>(m)])
                            : make_coin(field.theta_bar);
        if (field.wall && m == field.wall->site + N / 2)
            cm = make_reflecting_coin(field.wall->sign);
        // Open chain: the R output of site m lands at m+1 (dropped for the
        // last site), the L output at m-1 (dropped for the first site).
        if (m + 1 < N) {
            // U[2(m+1), 2m] = a and U[2(m+1), 2m+1] = b fold into
            // H[i+2, i] and H[i+1, i] with i = 2m and 2m+1.
            H.d2[static_cast<std::size_t>(2 * m)] += 0.5 * cm.a;
            H.d1[static_cast<std::size_t>(2 * m + 1)] += 0.5 * cm.b;
        }
        if (m - 1 >= 0) {
            // U[2(m-1)+1, 2m] = c and U[2(m-1)+1, 2m+1] = d fold into
            // H[2m-1 -> 2m] and H[2m-1 -> 2m+1].
            H.d1[static_cast<std::size_t>(2 * m - 1)] += 0.5 * cm.c;
            H.d2[static_cast<std::size_t>(2 * m - 1)] += 0.5 * cm.d;
        }
    }
    return H;
}

int count_below(const BandMatrix& H, double shift) {
    const int n = H.dim;
    // Working copies: the elimination updates the next two diagonals in place.
    std::vector<double> w0(static_cast<std::size_t>(n), -shift);
    std::vector<double> w1 = H.d1;
    std::vector<double> w2 = H.d2;
    constexpr double tiny = 1e-300;
    int neg = 0;
    for (int i = 0; i < n; ++i) {
        double p = w0[static_cast<std::size_t>(i)];
        if (std::abs(p) < tiny) p = -tiny;
        if (p < 0.0) ++neg;
        if (i + 1 < n) {
            const double l1 = w1[static_cast<std::size_t>(i)] / p;
            w0[static_cast<std::size_t>(i + 1)] -= l1 * w1[static_cast<std::size_t>(i)];
            if (i + 2 < n) {
                const double l2 = w2[static_cast<std::size_t>(i)] / p;
                w0[static_cast<std::size_t>(i + 2)] -= l2 * w2[static_cast<std::size_t>(i)];
                w1[static_cast<std::size_t>(i + 1)] -= l2 * w1[static_cast<std::size_t>(i)];
            }
        }
    }
    return neg;
}

int count_critical_window(const BandMatrix& H, double delta) {
    const double s = std::sin(delta);
    return count_below(H, s) - count_below(H, -s);
}

std::vector<double> log_spaced(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        throw std::invalid_argument("log grid needs 0 < lo < hi and >= 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    g.back() = hi;
    return g;
}

ShellDensity critical_dos_by_counting(const CountingConfig& config) {
    const std::size_t K = config.delta_grid.size();
    if (K < 2) throw std::invalid_argument("need at least two window widths");
    for (std::size_t k = 1; k < K; ++k)
        if (!(config.delta_grid[k] > config.delta_grid[k - 1]))
            throw std::invalid_argument("window ladder must be ascending");
    if (config.N % 4 != 0)
        throw std::invalid_argument("site count must be divisible by 4 (half system stays even)");

    const int nw = resolve_workers(config.workers);
    const std::size_t nblocks = block_count(config.samples);
    std::vector<std::vector<long long>> parts(nblocks,
                                              std::vector<long long>(K, 0));

    for_each_sample_blocked(config.samples, nw, [&](std::size_t i, std::size_t b) {
        const std::uint64_t s = stream_seed(config.seed, i);
        // Same draw stream for the full and half systems: the half system is
        // a fresh, smaller realization; only its end contribution must match
        // in expectation, which any same-distribution draw satisfies.
        CoinField big = sample_spatial_field(config.theta_bar, config.dtheta_s,
                                             config.N, s);
        CoinField half = sample_spatial_field(config.theta_bar, config.dtheta_s,
                                              config.N / 2, mix64(s));
        if (config.wall) {
            big.wall = Wall{0, *config.wall};
            half.wall = Wall{0, *config.wall};
        }
        const BandMatrix Hb = fold_band(big);
        const BandMatrix Hh = fold_band(half);
        auto& acc = parts[b];
        for (std::size_t k = 0; k < K; ++k) {
            const double d = config.delta_grid[k];
            acc[k] += count_critical_window(Hb, d) - count_critical_window(Hh, d);
        }
    });

    std::vector<long long> counts(K, 0);
    for (const auto& p : parts)
        for (std::size_t k = 0; k < K; ++k) counts[k] += p[k];

    ShellDensity out;
    out.delta_mid.resize(K - 1);
    out.rho.resize(K - 1);
    // Bulk weight after subtraction: N eigenstates; each window spans four
    // arcs, so a shell between delta_k and delta_{k+1} has measure
    // 4 (delta_{k+1} - delta_k).
    const double weight = static_cast<double>(config.samples) *
                          static_cast<double>(config.N) * 4.0;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        out.delta_mid[k] = std::sqrt(config.delta_grid[k] * config.delta_grid[k + 1]);
        out.rho[k] = static_cast<double>(counts[k + 1] - counts[k]) /
                     (weight * (config.delta_grid[k + 1] - config.delta_grid[k]));
    }
    return out;
}

}  // namespace qwalk
