#include "qwalk/core.hpp"

#include <cmath>
#include <stdexcept>

#include "qwalk/rng.hpp"

namespace qwalk {

CoinMatrix make_coin(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("coin angle must be finite");
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
}

CoinMatrix make_reflecting_coin(WallSign sign) {
    const double g = (sign == WallSign::plus) ? 1.0 : -1.0;
    return {0.0, -g, g, 0.0};
}

double CoinField::angle(int m, std::uint64_t t) const {
    switch (mode) {
        case DisorderMode::clean:
            return theta_bar;
        case DisorderMode::spatial:
            return theta[static_cast<std::size_t>(m)];
        case DisorderMode::temporal:
            return counter_angle(seed, t, theta_bar, dtheta);
    }
    return theta_bar;
}

static void check_even_sites(int N) {
    if (N < 4 || N % 2 != 0)
        throw std::invalid_argument("site count must be even and at least 4");
}

CoinField clean_field(double theta_bar, int N) {
    check_even_sites(N);
    CoinField f;
    f.mode = DisorderMode::clean;
    f.theta_bar = theta_bar;
    f.N = N;
    return f;
}

CoinField sample_spatial_field(double theta_bar, double dtheta_s, int N, std::uint64_t seed) {
    check_even_sites(N);
    if (!(dtheta_s >= 0.0)) throw std::invalid_argument("disorder width must be >= 0");
    CoinField f;
    f.mode = DisorderMode::spatial;
    f.theta_bar = theta_bar;
    f.dtheta = dtheta_s;
    f.N = N;
    f.seed = seed;
    f.theta.resize(static_cast<std::size_t>(N));
    Rng rng(seed);
    for (auto& th : f.theta) th = rng.angle(theta_bar, dtheta_s);
    return f;
}

CoinField temporal_field(double theta_bar, double dtheta_t, int N, std::uint64_t seed) {
    check_even_sites(N);
    if (!(dtheta_t >= 0.0)) throw std::invalid_argument("disorder width must be >= 0");
    CoinField f;
    f.mode = DisorderMode::temporal;
    f.theta_bar = theta_bar;
    f.dtheta = dtheta_t;
    f.N = N;
    f.seed = seed;
    return f;
}

double WalkerState::norm_sq() const {
    double s = 0.0;
    for (const auto& z : amp) s += std::norm(z);
    return s;
}

WalkerState initial_state(int N) {
    check_even_sites(N);
    WalkerState st;
    st.N = N;
    st.amp.assign(static_cast<std::size_t>(2 * N), Complex(0.0, 0.0));
    const double r = 1.0 / std::sqrt(2.0);
    st.at(0, 0) = Complex(r, 0.0);
    st.at(0, 1) = Complex(0.0, r);
    return st;
}

// Coin coefficients of site m as used by the gather kernel.
static inline CoinMatrix site_coin(const CoinField& field, const CoinMatrix& bulk, int m) {
    if (field.wall && m == field.wall->site + field.N / 2)
        return make_reflecting_coin(field.wall->sign);
    if (field.mode == DisorderMode::spatial) {
        const double th = field.theta[static_cast<std::size_t>(m)];
        return {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)};
    }
    return bulk;  // clean and temporal: one coin everywhere (except the wall)
}

void step_into(const WalkerState& state, const CoinField& field,
               const BoundaryConfig& boundary, std::uint64_t t, WalkerState& out) {
    const int N = state.N;
    if (field.N != N) throw std::invalid_argument("field/state size mismatch");
    if (static_cast<int>(out.amp.size()) != 2 * N)
        throw std::invalid_argument("output state size mismatch");
    out.N = N;

    const double bulk_theta =
        (field.mode == DisorderMode::temporal) ? field.angle(0, t) : field.theta_bar;
    const CoinMatrix bulk = {std::cos(bulk_theta), -std::sin(bulk_theta),
                             std::sin(bulk_theta), std::cos(bulk_theta)};
    const bool ring = boundary.topology == Topology::ring;

    // Gather form: the R output of site m comes from site m-1, the L output
    // from site m+1.  Coin applied at the source site, then shifted here.
    for (int m = 0; m < N; ++m) {
        Complex r_out(0.0, 0.0), l_out(0.0, 0.0);
        int src = m - 1;
        if (src < 0 && ring) src = N - 1;
        if (src >= 0) {
            const CoinMatrix cm = site_coin(field, bulk, src);
            const Complex* s = &state.amp[static_cast<std::size_t>(2 * src)];
            r_out = cm.a * s[0] + cm.b * s[1];
        }
        src = m + 1;
        if (src >= N && ring) src = 0;
        if (src < N) {
            const CoinMatrix cm = site_coin(field, bulk, src);
            const Complex* s = &state.amp[static_cast<std::size_t>(2 * src)];
            l_out = cm.c * s[0] + cm.d * s[1];
        }
        out.amp[static_cast<std::size_t>(2 * m)] = r_out;
        out.amp[static_cast<std::size_t>(2 * m + 1)] = l_out;
    }
}

WalkerState step(const WalkerState& state, const CoinField& field,
                 const BoundaryConfig& boundary, std::uint64_t t) {
    WalkerState out;
    out.N = state.N;
    out.amp.resize(state.amp.size());
    step_into(state, field, boundary, t, out);
    return out;
}

std::array<double, 2> dispersion(double k, double theta) {
    const double x = std::cos(k) * std::cos(theta);
    const double w = std::acos(std::min(1.0, std::max(-1.0, x)));
    return {w, -w};
}

}  // namespace qwalk
