#pragma once
#include <cstdint>
#include <vector>

#include "qwalk/core.hpp"

namespace qwalk {

// Quasi-energy carried as (cos omega, sin omega) so that energies
// exponentially close to the band-center points +-pi/2 keep full relative
// precision: at omega = pi/2 - delta, cos omega = sin(delta) is computed
// from delta directly instead of cancelling against pi/2.
struct QuasiEnergy {
    double c = 1.0;  // cos(omega)
    double s = 0.0;  // sin(omega)

    static QuasiEnergy from_omega(double omega);
    // omega = pi/2 - delta (from below the band-center point).
    static QuasiEnergy near_half_pi(double delta);
    QuasiEnergy negated() const { return {c, -s}; }
    QuasiEnergy shifted_half_turn() const { return {-c, -s}; }
};

// 2x2 matrix propagating (psi_{n+1,R}, psi_{n,L}) from (psi_{n,R}, psi_{n-1,L}):
//   [ e^{-i omega}/cos th   -tan th          ]
//   [ -tan th                e^{i omega}/cos th ]
// Unimodular: det = sec^2 - tan^2 = 1.
struct TransferMatrix {
    Complex t11, t12, t21, t22;
    Complex det() const { return t11 * t22 - t12 * t21; }
};

// Throws singular_coin_error when |cos theta| <= 1e-12.
TransferMatrix transfer_matrix(double theta, const QuasiEnergy& omega);
TransferMatrix transfer_matrix(double theta, double omega);

struct LyapunovConfig {
    QuasiEnergy omega;
    double theta_bar = 0.0;
    double dtheta_s = 0.0;
    std::uint64_t sites = 0;      // chain length, >= 1e4
    std::uint64_t seed = 0;
    int renorm_interval = 16;     // steps between vector renormalizations
    int blocks = 100;             // error-bar blocks
};

struct LyapunovResult {
    double gamma = 0.0;           // growth rate per site of the propagated vector
    double xi = 0.0;              // localization length 1/gamma
    double stderr_ = 0.0;         // from block-mean statistics
    std::uint64_t sites = 0;
    std::uint64_t resampled = 0;  // draws rejected for |cos theta| < 1e-12
    bool interval_reduced = false;  // renormalization tightened on overflow risk
};

// Growth exponent of a single propagated vector through the disordered
// transfer-matrix product.  Log-norms accumulate in extended precision; the
// vector is renormalized every `renorm_interval` steps, immediately (and
// with a persistently halved interval) when components threaten overflow.
// Disorder draws come from Rng(seed); angles with |cos theta| < 1e-12 are
// redrawn from the same interval and counted.
LyapunovResult lyapunov(const LyapunovConfig& config);

// Both exponents of the product from a QR-orthonormalized 2-frame; their sum
// estimates log|det| per site = 0 and the leading one cross-checks `lyapunov`.
struct LyapunovPair {
    double gamma_plus = 0.0, gamma_minus = 0.0;
};
LyapunovPair lyapunov_pair(const LyapunovConfig& config);

struct XiPoint {
    double delta = 0.0;    // distance below the band-center energy pi/2
    double gamma = 0.0;
    double xi = 0.0;
    double stderr_ = 0.0;
};

// Localization length at omega = pi/2 - delta for each delta in the list.
// All points of one curve share the same seed (matched disorder), which
// makes the curve smooth in delta.  Deltas outside [1e-15, 1e-1] are
// rejected: below that the distinction from exactly pi/2 is lost in double
// precision.
std::vector<XiPoint> xi_vs_energy(const std::vector<double>& deltas, double theta_bar,
                                  double dtheta_s, std::uint64_t sites, std::uint64_t seed);

}  // namespace qwalk
