#include "qwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <lapacke.h>

#include "qwalk/errors.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"

namespace qwalk {

namespace {
constexpr double kPi = std::numbers::pi;
}

Eigen::MatrixXd build_step_matrix(const CoinField& field, const BoundaryConfig& boundary,
                                  int max_sites) {
    const int N = field.N;
    if (N > max_sites)
        throw capacity_error("dense step-matrix assembly capped at " +
                             std::to_string(max_sites) + " sites");
    if (field.mode == DisorderMode::temporal)
        throw std::invalid_argument("step matrix is defined for static coin fields");
    if (boundary.topology != Topology::ring)
        throw std::invalid_argument("spectral computations use ring topology");

    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    const CoinMatrix bulk = make_coin(field.theta_bar);
    for (int m = 0; m < N; ++m) {
        CoinMatrix cm = bulk;
        if (field.wall && m == field.wall->site + N / 2)
            cm = make_reflecting_coin(field.wall->sign);
        else if (field.mode == DisorderMode::spatial)
            cm = make_coin(field.theta[static_cast<std::size_t>(m)]);
        const int up = (m + 1) % N;     // receives the R output of site m
        const int down = (m - 1 + N) % N;  // receives the L output of site m
        U(2 * up + 0, 2 * m + 0) += cm.a;
        U(2 * up + 0, 2 * m + 1) += cm.b;
        U(2 * down + 1, 2 * m + 0) += cm.c;
        U(2 * down + 1, 2 * m + 1) += cm.d;
    }
    return U;
}

Spectrum eigenphases(const Eigen::MatrixXd& U) {
    const lapack_int n = static_cast<lapack_int>(U.rows());
    if (U.cols() != U.rows() || n < 2 || n % 2 != 0)
        throw std::invalid_argument("step matrix must be square with even dimension");
    const double ortho = (U.transpose() * U - Eigen::MatrixXd::Identity(n, n))
                             .cwiseAbs()
                             .maxCoeff();
    if (ortho > 1e-10)
        throw std::invalid_argument("matrix is not orthogonal: residual " +
                                    std::to_string(ortho));

    Eigen::MatrixXd A = U;  // dgeev overwrites its input
    std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
    const lapack_int info =
        LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, wr.data(), wi.data(),
                      nullptr, 1, nullptr, 1);
    if (info != 0)
        throw numerical_error("dense eigensolver failed, info = " + std::to_string(info));

    Spectrum spec;
    spec.N = static_cast<int>(n / 2);
    spec.phases.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < spec.phases.size(); ++i) {
        double p = std::atan2(wi[i], wr[i]);
        if (p <= -kPi) p = kPi;  // branch (-pi, pi]: -pi is the same phase as +pi
        spec.phases[i] = p;
        spec.max_residual =
            std::max(spec.max_residual, std::abs(std::hypot(wr[i], wi[i]) - 1.0));
    }
    if (spec.max_residual > 1e-8)
        throw numerical_error("eigenvalues drifted off the unit circle");
    return spec;
}

double clean_dos(double omega, double theta) {
    const double c2t = std::cos(theta) * std::cos(theta);
    const double c2w = std::cos(omega) * std::cos(omega);
    if (c2w > c2t) return 0.0;
    if (c2w == c2t) return std::numeric_limits<double>::infinity();
    return std::abs(std::sin(omega)) / (2.0 * kPi * std::sqrt(c2t - c2w));
}

EdgeCounts detect_edge_states(const Spectrum& spec, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    EdgeCounts ec;
    for (double p : spec.phases) {
        if (std::abs(p) < tol) ++ec.at_zero;
        if (std::abs(std::abs(p) - kPi) < tol) ++ec.at_pi;
    }
    return ec;
}

double default_edge_tol(int N, bool disordered) {
    if (!disordered) return 1e-8;
    return std::max(1e-8, 0.1 * 2.0 * kPi / (2.0 * N));
}

SymmetryReport check_quadruplet_symmetry(const Spectrum& spec, double tol) {
    // Compare the sorted multiset with its image under each map; the worst
    // per-rank distance is the matching cost for symmetric point sets.
    std::vector<double> base = spec.phases;
    std::sort(base.begin(), base.end());
    auto worst_against = [&base](std::vector<double> mapped) {
        std::sort(mapped.begin(), mapped.end());
        double worst = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i)
            worst = std::max(worst, std::abs(base[i] - mapped[i]));
        return worst;
    };

    auto wrap = [](double p) {  // into (-pi, pi]
        while (p > kPi) p -= 2.0 * kPi;
        while (p <= -kPi) p += 2.0 * kPi;
        return p;
    };

    SymmetryReport rep;
    {
        std::vector<double> neg(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) neg[i] = wrap(-base[i]);
        rep.worst_negation = worst_against(std::move(neg));
    }
    {
        std::vector<double> half(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) half[i] = wrap(base[i] + kPi);
        rep.worst_half_turn = worst_against(std::move(half));
    }
    // A phase sitting within rounding of the +pi branch cut can jump to the
    // other end of the sorted order and fake a 2pi mismatch; fold that back.
    auto defuzz = [](double w) { return std::min(w, std::abs(w - 2.0 * kPi)); };
    rep.worst_negation = defuzz(rep.worst_negation);
    rep.worst_half_turn = defuzz(rep.worst_half_turn);
    rep.tol = tol;
    rep.passed = rep.ok(tol);
    return rep;
}

double DosHistogram::integral() const {
    double s = 0.0;
    for (double d : density) s += d;
    return s * bin_width();
}

double DosHistogram::peak_density_near(double center, double half_width) const {
    double best = 0.0;
    for (std::size_t b = 0; b < density.size(); ++b) {
        const double mid = 0.5 * (edges[b] + edges[b + 1]);
        if (std::abs(std::abs(mid) - center) < half_width)
            best = std::max(best, density[b]);
    }
    return best;
}

DosHistogram dos_ensemble(const DosConfig& config) {
    if (config.bins < 2) throw std::invalid_argument("need at least 2 bins");
    if (config.samples < 1) throw std::invalid_argument("need at least one sample");
    const int N = config.N;
    const int n = 2 * N;
    const int bins = config.bins;
    const double width = 2.0 * kPi / bins;
    const int nw = resolve_workers(config.workers);

    const std::size_t nblocks = block_count(config.samples);
    struct Partial {
        std::vector<double> hist;  // 0.5-weight entries; dyadic, so order-free
        long long at_zero = 0, at_pi = 0, kept = 0;
    };
    std::vector<Partial> parts(nblocks);
    for (auto& p : parts) p.hist.assign(static_cast<std::size_t>(bins), 0.0);

    for_each_sample_blocked(config.samples, nw, [&](std::size_t i, std::size_t b) {
        CoinField field =
            sample_spatial_field(config.theta_bar, config.dtheta_s, N,
                                 stream_seed(config.seed, i));
        if (config.wall) field.wall = Wall{0, *config.wall};
        const Eigen::MatrixXd U = build_step_matrix(field, BoundaryConfig{});

        // Symmetric fold: eigenvalues of (U + U^T)/2 are cos(omega).
        Eigen::MatrixXd H = 0.5 * (U + U.transpose());
        std::vector<double> w(static_cast<std::size_t>(n));
        const lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U',
                                              static_cast<lapack_int>(n), H.data(),
                                              static_cast<lapack_int>(n), w.data());
        if (info != 0)
            throw numerical_error("symmetric eigensolver failed, info = " +
                                  std::to_string(info));

        Partial& p = parts[b];
        for (double cw : w) {
            if (config.exclude_boundary_modes && std::abs(cw - 1.0) < 1e-12) {
                ++p.at_zero;
                continue;
            }
            if (config.exclude_boundary_modes && std::abs(cw + 1.0) < 1e-12) {
                ++p.at_pi;
                continue;
            }
            const double aw = std::acos(std::min(1.0, std::max(-1.0, cw)));
            // Mirror split: 0.5 weight at +|omega| and at -|omega|.
            int bp = static_cast<int>((aw + kPi) / width);
            int bm = static_cast<int>((-aw + kPi) / width);
            bp = std::min(std::max(bp, 0), bins - 1);
            bm = std::min(std::max(bm, 0), bins - 1);
            p.hist[static_cast<std::size_t>(bp)] += 0.5;
            p.hist[static_cast<std::size_t>(bm)] += 0.5;
            ++p.kept;
        }
    });

    DosHistogram out;
    out.N = N;
    out.samples = config.samples;
    out.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) out.edges[static_cast<std::size_t>(b)] = -kPi + b * width;
    out.density.assign(static_cast<std::size_t>(bins), 0.0);

    long long kept = 0;
    for (const auto& p : parts) {
        kept += p.kept;
        out.boundary_modes.at_zero += static_cast<int>(p.at_zero);
        out.boundary_modes.at_pi += static_cast<int>(p.at_pi);
        for (int b = 0; b < bins; ++b)
            out.density[static_cast<std::size_t>(b)] += p.hist[static_cast<std::size_t>(b)];
    }
    out.kept = static_cast<std::uint64_t>(kept);
    if (kept > 0) {
        const double norm = 1.0 / (static_cast<double>(kept) * width);
        for (double& d : out.density) d *= norm;
    }
    return out;
}

}  // namespace qwalk
