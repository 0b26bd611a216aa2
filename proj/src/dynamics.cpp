#include "qwalk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

std::vector<double> probability_distribution(const WalkerState& state) {
    std::vector<double> P(static_cast<std::size_t>(state.N));
    for (int m = 0; m < state.N; ++m)
        P[static_cast<std::size_t>(m)] = std::norm(state.amp[static_cast<std::size_t>(2 * m)]) +
                                         std::norm(state.amp[static_cast<std::size_t>(2 * m + 1)]);
    return P;
}

double survival_probability(const WalkerState& state) {
    const int m0 = state.N / 2;
    return std::norm(state.amp[static_cast<std::size_t>(2 * m0)]) +
           std::norm(state.amp[static_cast<std::size_t>(2 * m0 + 1)]);
}

double position_variance(const WalkerState& state) {
    double mean = 0.0, second = 0.0;
    for (int m = 0; m < state.N; ++m) {
        const double n = m - state.N / 2;
        const double p = std::norm(state.amp[static_cast<std::size_t>(2 * m)]) +
                         std::norm(state.amp[static_cast<std::size_t>(2 * m + 1)]);
        mean += p * n;
        second += p * n * n;
    }
    const double v = second - mean * mean;
    return v > 0.0 ? v : 0.0;
}

std::vector<std::uint64_t> recording_times(std::uint64_t steps, std::uint64_t stride) {
    std::vector<std::uint64_t> out;
    if (steps == 0) return out;
    if (stride > 0) {
        for (std::uint64_t t = stride; t < steps; t += stride) out.push_back(t);
        out.push_back(steps);
        return out;
    }
    // Default rule: dense early, logarithmic after t = 100 (ratio 2^(1/32)).
    const std::uint64_t dense_until = std::min<std::uint64_t>(steps, 100);
    for (std::uint64_t t = 1; t <= dense_until; ++t) out.push_back(t);
    if (steps > 100) {
        const double ratio = std::pow(2.0, 1.0 / 32.0);
        double next = 100.0 * ratio;
        std::uint64_t last = 100;
        while (true) {
            const std::uint64_t t = std::max<std::uint64_t>(
                last + 1, static_cast<std::uint64_t>(std::llround(next)));
            if (t >= steps) break;
            out.push_back(t);
            last = t;
            next = std::max(next * ratio, static_cast<double>(t) * ratio);
        }
        out.push_back(steps);
    }
    return out;
}

namespace {

// Evolution workspace with per-site coin coefficients resolved once (spatial
// fields are static) and a tracked active window: amplitudes live within
// [m0 - t - 1, m0 + t + 1], so early steps touch only a few sites.  On the
// sized lattice N >= 2*steps + 4 the window never reaches the array ends,
// which makes the open-window update and the ring update identical.
struct Evolver {
    int N, m0;
    bool temporal;
    std::uint64_t seed;
    double theta_bar, dtheta;
    std::vector<double> ca, cb, cc, cd;  // per-site coin rows (non-temporal)
    int wall_m = -1;
    CoinMatrix wall_coin{0, 0, 0, 0};
    std::vector<Complex> cur, nxt;
    int lo, hi;  // active site range [lo, hi)

    explicit Evolver(const CoinField& field) {
        N = field.N;
        m0 = N / 2;
        temporal = field.mode == DisorderMode::temporal;
        seed = field.seed;
        theta_bar = field.theta_bar;
        dtheta = field.dtheta;
        if (!temporal) {
            ca.resize(N); cb.resize(N); cc.resize(N); cd.resize(N);
            for (int m = 0; m < N; ++m) {
                const double th = field.mode == DisorderMode::spatial
                                      ? field.theta[static_cast<std::size_t>(m)]
                                      : field.theta_bar;
                ca[m] = std::cos(th); cb[m] = -std::sin(th);
                cc[m] = std::sin(th); cd[m] = std::cos(th);
            }
        }
        if (field.wall) {
            wall_m = field.wall->site + m0;
            wall_coin = make_reflecting_coin(field.wall->sign);
            if (!temporal) {
                ca[wall_m] = wall_coin.a; cb[wall_m] = wall_coin.b;
                cc[wall_m] = wall_coin.c; cd[wall_m] = wall_coin.d;
            }
        }
        cur.assign(static_cast<std::size_t>(2 * N), Complex(0, 0));
        nxt.assign(static_cast<std::size_t>(2 * N), Complex(0, 0));
        const double r = 1.0 / std::sqrt(2.0);
        cur[static_cast<std::size_t>(2 * m0)] = Complex(r, 0);
        cur[static_cast<std::size_t>(2 * m0 + 1)] = Complex(0, r);
        lo = m0; hi = m0 + 1;
    }

    // One step; t is the 0-based step index being applied.
    void advance(std::uint64_t t) {
        const int new_lo = std::max(0, lo - 1), new_hi = std::min(N, hi + 1);
        if (temporal) {
            const double th = counter_angle(seed, t, theta_bar, dtheta);
            const double a = std::cos(th), b = -std::sin(th), c = std::sin(th), d = a;
            for (int m = new_lo; m < new_hi; ++m) {
                const int ml = m - 1, mr = m + 1;
                Complex r_out(0, 0), l_out(0, 0);
                if (ml >= lo && ml < hi) {
                    const Complex* s = &cur[static_cast<std::size_t>(2 * ml)];
                    if (ml == wall_m)
                        r_out = wall_coin.a * s[0] + wall_coin.b * s[1];
                    else
                        r_out = a * s[0] + b * s[1];
                }
                if (mr >= lo && mr < hi) {
                    const Complex* s = &cur[static_cast<std::size_t>(2 * mr)];
                    if (mr == wall_m)
                        l_out = wall_coin.c * s[0] + wall_coin.d * s[1];
                    else
                        l_out = c * s[0] + d * s[1];
                }
                nxt[static_cast<std::size_t>(2 * m)] = r_out;
                nxt[static_cast<std::size_t>(2 * m + 1)] = l_out;
            }
        } else {
            for (int m = new_lo; m < new_hi; ++m) {
                const int ml = m - 1, mr = m + 1;
                Complex r_out(0, 0), l_out(0, 0);
                if (ml >= lo && ml < hi) {
                    const Complex* s = &cur[static_cast<std::size_t>(2 * ml)];
                    r_out = ca[ml] * s[0] + cb[ml] * s[1];
                }
                if (mr >= lo && mr < hi) {
                    const Complex* s = &cur[static_cast<std::size_t>(2 * mr)];
                    l_out = cc[mr] * s[0] + cd[mr] * s[1];
                }
                nxt[static_cast<std::size_t>(2 * m)] = r_out;
                nxt[static_cast<std::size_t>(2 * m + 1)] = l_out;
            }
        }
        std::swap(cur, nxt);
        lo = new_lo; hi = new_hi;
    }

    WalkerState snapshot() const {
        WalkerState st;
        st.N = N;
        st.amp = cur;
        return st;
    }
};

CoinField field_for(const TrajectoryConfig& config, int N) {
    CoinField f;
    switch (config.mode) {
        case DisorderMode::clean:
            f = clean_field(config.theta_bar, N);
            break;
        case DisorderMode::spatial:
            f = sample_spatial_field(config.theta_bar, config.dtheta, N, config.seed);
            break;
        case DisorderMode::temporal:
            f = temporal_field(config.theta_bar, config.dtheta, N, config.seed);
            break;
    }
    if (config.wall) f.wall = Wall{0, *config.wall};
    return f;
}

}  // namespace

Trajectory run_trajectory(const TrajectoryConfig& config) {
    if (config.steps == 0) throw std::invalid_argument("steps must be positive");
    const std::uint64_t min_N = 2 * config.steps + 4;
    int N = config.N;
    if (N == 0) {
        N = static_cast<int>(min_N);
    } else if (static_cast<std::uint64_t>(N) < min_N) {
        throw std::invalid_argument("lattice too small: need N >= 2*steps + 4");
    }

    const CoinField field = field_for(config, N);
    Evolver ev(field);

    Trajectory traj;
    traj.N = N;
    traj.config = config;
    traj.times = recording_times(config.steps, config.stride);

    std::size_t next_rec = 0;
    for (std::uint64_t t = 0; t < config.steps; ++t) {
        ev.advance(t);
        if (next_rec < traj.times.size() && traj.times[next_rec] == t + 1) {
            const WalkerState snap = ev.snapshot();
            traj.survival.push_back(survival_probability(snap));
            traj.variance.push_back(position_variance(snap));
            ++next_rec;
        }
    }
    if (config.record_final_distribution)
        traj.final_distribution = probability_distribution(ev.snapshot());
    return traj;
}

EnsembleResult run_ensemble(const TrajectoryConfig& config, std::uint64_t samples,
                            int workers) {
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    const int nw = resolve_workers(workers);

    // Resolve sizes once so accumulators can be preallocated.
    TrajectoryConfig probe = config;
    const std::vector<std::uint64_t> times = recording_times(config.steps, config.stride);
    const std::uint64_t min_N = 2 * config.steps + 4;
    const int N = config.N == 0 ? static_cast<int>(min_N) : config.N;
    probe.N = N;

    const std::size_t T = times.size();
    const std::size_t S = static_cast<std::size_t>(N);
    const std::size_t nblocks = block_count(samples);

    // Per-block partial sums and sums of squares, merged in block order below.
    struct Partial {
        std::vector<double> s_sum, s_sq, v_sum, v_sq, p_sum, p_sq;
    };
    std::vector<Partial> parts(nblocks);
    for (auto& p : parts) {
        p.s_sum.assign(T, 0.0); p.s_sq.assign(T, 0.0);
        p.v_sum.assign(T, 0.0); p.v_sq.assign(T, 0.0);
        if (config.record_final_distribution) {
            p.p_sum.assign(S, 0.0); p.p_sq.assign(S, 0.0);
        }
    }

    for_each_sample_blocked(samples, nw, [&](std::size_t i, std::size_t b) {
        TrajectoryConfig c = probe;
        c.seed = stream_seed(config.seed, i);
        const Trajectory tr = run_trajectory(c);
        Partial& p = parts[b];
        for (std::size_t k = 0; k < T; ++k) {
            p.s_sum[k] += tr.survival[k];
            p.s_sq[k] += tr.survival[k] * tr.survival[k];
            p.v_sum[k] += tr.variance[k];
            p.v_sq[k] += tr.variance[k] * tr.variance[k];
        }
        if (config.record_final_distribution)
            for (std::size_t k = 0; k < S; ++k) {
                p.p_sum[k] += tr.final_distribution[k];
                p.p_sq[k] += tr.final_distribution[k] * tr.final_distribution[k];
            }
    });

    EnsembleResult res;
    res.samples = samples;
    res.times = times;
    res.N = N;
    res.config = config;

    const double M = static_cast<double>(samples);
    auto reduce = [&](auto get_sum, auto get_sq, std::size_t count,
                      std::vector<double>& mean, std::vector<double>& serr) {
        mean.assign(count, 0.0);
        serr.assign(count, 0.0);
        for (std::size_t k = 0; k < count; ++k) {
            double s = 0.0, q = 0.0;
            for (std::size_t b = 0; b < nblocks; ++b) {
                s += get_sum(parts[b])[k];
                q += get_sq(parts[b])[k];
            }
            mean[k] = s / M;
            if (samples > 1) {
                const double var = std::max(0.0, (q - s * s / M) / (M - 1.0));
                serr[k] = std::sqrt(var / M);
            }
        }
    };
    reduce([](const Partial& p) -> const std::vector<double>& { return p.s_sum; },
           [](const Partial& p) -> const std::vector<double>& { return p.s_sq; }, T,
           res.survival_mean, res.survival_stderr);
    reduce([](const Partial& p) -> const std::vector<double>& { return p.v_sum; },
           [](const Partial& p) -> const std::vector<double>& { return p.v_sq; }, T,
           res.variance_mean, res.variance_stderr);
    if (config.record_final_distribution)
        reduce([](const Partial& p) -> const std::vector<double>& { return p.p_sum; },
               [](const Partial& p) -> const std::vector<double>& { return p.p_sq; }, S,
               res.distribution_mean, res.distribution_stderr);
    return res;
}

double loglog_slope(const std::vector<std::uint64_t>& x, const std::vector<double>& y,
                    double lo, double hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        const double xv = static_cast<double>(x[i]);
        if (xv < lo || xv > hi || !(y[i] > 0.0)) continue;
        const double lx = std::log(xv), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("not enough points in the fit window");
    const double d = n * sxx - sx * sx;
    if (d == 0.0) throw std::invalid_argument("degenerate fit window");
    return (n * sxy - sx * sy) / d;
}

double excess_kurtosis(const std::vector<double>& P) {
    const double half = static_cast<double>(P.size()) / 2.0;
    double w = 0, mean = 0;
    for (std::size_t m = 0; m < P.size(); ++m) {
        w += P[m];
        mean += P[m] * (static_cast<double>(m) - half);
    }
    if (w <= 0.0) throw std::invalid_argument("empty distribution");
    mean /= w;
    double m2 = 0, m4 = 0;
    for (std::size_t m = 0; m < P.size(); ++m) {
        const double d = static_cast<double>(m) - half - mean;
        m2 += P[m] * d * d;
        m4 += P[m] * d * d * d * d;
    }
    m2 /= w; m4 /= w;
    if (m2 <= 0.0) throw std::invalid_argument("zero-variance distribution");
    return m4 / (m2 * m2) - 3.0;
}

}  // namespace qwalk
