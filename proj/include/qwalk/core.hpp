#pragma once
#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace qwalk {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Lattice conventions used throughout:
//   sites n in {-N/2, ..., N/2 - 1} with N even; array index m = n + N/2;
//   chirality R (right mover) before L in the interleaved amplitude layout
//   amp[2*m + 0] = psi_{n,R}, amp[2*m + 1] = psi_{n,L}.
// One step applies the site-local 2x2 coin and then shifts the R component
// one site right and the L component one site left.
// ---------------------------------------------------------------------------

enum class DisorderMode { clean, spatial, temporal };
enum class WallSign { plus, minus };
enum class Topology { ring, open_guard };

// 2x2 coin acting on (R, L):  phi_R = a psi_R + b psi_L ; phi_L = c psi_R + d psi_L.
// Rotation coins and reflecting coins are real orthogonal, so real entries
// suffice; this keeps the stepping kernel in real arithmetic per component.
struct CoinMatrix {
    double a, b, c, d;
};

// Rotation coin [[cos, -sin], [sin, cos]].  Throws std::invalid_argument for
// non-finite angles.
CoinMatrix make_coin(double theta);

// Reflecting coin: minus -> [[0, 1], [-1, 0]], plus -> [[0, -1], [1, 0]].
// Swaps the movers (full reflection); applying it twice negates the vector.
CoinMatrix make_reflecting_coin(WallSign sign);

// A reflecting coin replacing the rotation coin at one site.
struct Wall {
    int site = 0;  // site index n (the origin in all shipped experiments)
    WallSign sign = WallSign::minus;
};

// Disorder realization: which angle multiplies which site at which step.
struct CoinField {
    DisorderMode mode = DisorderMode::clean;
    double theta_bar = 0.0;       // mean angle
    double dtheta = 0.0;          // full width of the uniform interval
    int N = 0;                    // number of sites (even)
    std::vector<double> theta;    // per-site angles, spatial mode only
    std::optional<Wall> wall;     // optional reflecting site
    std::uint64_t seed = 0;       // stream seed (drives temporal draws)

    // Angle of the coin at array index m for step t (wall not applied here).
    double angle(int m, std::uint64_t t) const;
};

// theta_n = theta_bar everywhere.
CoinField clean_field(double theta_bar, int N);

// Per-site i.i.d. angles uniform on [theta_bar - dtheta_s/2, theta_bar + dtheta_s/2],
// deterministic under seed.  Throws std::invalid_argument for dtheta_s < 0 or odd N.
CoinField sample_spatial_field(double theta_bar, double dtheta_s, int N, std::uint64_t seed);

// One fresh angle per step, shared by every site within that step.
CoinField temporal_field(double theta_bar, double dtheta_t, int N, std::uint64_t seed);

struct BoundaryConfig {
    Topology topology = Topology::ring;
};

struct WalkerState {
    int N = 0;                  // even number of sites
    std::vector<Complex> amp;   // 2N interleaved amplitudes

    int site_index(int n) const { return n + N / 2; }
    Complex& at(int n, int sigma) { return amp[2 * (n + N / 2) + sigma]; }
    const Complex& at(int n, int sigma) const { return amp[2 * (n + N / 2) + sigma]; }
    double norm_sq() const;
};

// |0> x (|R> + i|L>)/sqrt(2): the standard symmetric launch state.
WalkerState initial_state(int N);

// One step of the walk; pure function of its inputs (t selects the temporal
// angle and is ignored otherwise).  Ring topology wraps the shift;
// open_guard drops amplitude that would leave the array (used only as a
// guard for non-wrapping windows, never in production runs).
WalkerState step(const WalkerState& state, const CoinField& field,
                 const BoundaryConfig& boundary, std::uint64_t t);

// In-place kernel behind `step`: writes the advanced state into `out`
// (out.amp must already have size 2N).  Gather form: each output site reads
// its two source sites, so the result is bit-identical whether sites are
// processed serially or in parallel.
void step_into(const WalkerState& state, const CoinField& field,
               const BoundaryConfig& boundary, std::uint64_t t, WalkerState& out);

// Quasi-energy branches at wavenumber k: the two omega in (-pi, pi] with
// cos(omega) = cos(k) cos(theta).
std::array<double, 2> dispersion(double k, double theta);

}  // namespace qwalk
