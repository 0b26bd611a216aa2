#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "qwalk/core.hpp"

namespace qwalk {

// Large-lattice route to the critical density of states.
//
// In the interleaved basis i = 2m + sigma the symmetric fold (U + U^T)/2 of
// an *open* chain is pentadiagonal (half-bandwidth 2, zero diagonal), so
// counting its eigenvalues below a shift costs O(N) via the inertia of an
// LDL^T sweep.  Eigenvalues are cos(omega); the states within delta of the
// band-center energies satisfy |cos omega| < sin(delta), which covers the
// two symmetric windows around +-pi/2.  Densities come from count
// differences over a ladder of nested windows.  Cutting the ring adds an
// O(1) end contribution to every count; evaluating the same counts at N and
// N/2 sites and subtracting cancels it, leaving an effective bulk weight of
// N eigenstates.

struct BandMatrix {
    int dim = 0;
    std::vector<double> d1;  // sub-diagonal H[i+1, i], size dim-1
    std::vector<double> d2;  // second sub-diagonal H[i+2, i], size dim-2
};

// Band diagonals of the open-chain symmetric fold for this field (the ring
// wrap terms are dropped; the diagonal is identically zero).
BandMatrix fold_band(const CoinField& field);

// Number of eigenvalues strictly below `shift` from the signs of the LDL^T
// pivots, with small pivots replaced by -tiny so the sweep never divides by
// zero (a shift colliding with an eigenvalue may then be off by one, which
// is harmless for window statistics).
int count_below(const BandMatrix& H, double shift);

// Eigenvalues with |cos omega| < sin(delta)  ==  quasi-energies within
// delta of +-pi/2 (all four symmetric arcs).
int count_critical_window(const BandMatrix& H, double delta);

struct ShellDensity {
    std::vector<double> delta_mid;  // geometric midpoints of the window ladder
    std::vector<double> rho;        // density of states at pi/2 - delta_mid
};

struct CountingConfig {
    double theta_bar = 0.0;
    double dtheta_s = 0.0;
    int N = 10000;                   // sites of the large system
    std::uint64_t samples = 100;
    std::vector<double> delta_grid;  // ascending window half-widths
    std::uint64_t seed = 0;
    std::optional<WallSign> wall;
    int workers = 0;
};

// Ensemble-averaged density of states at quasi-energies pi/2 - delta for the
// given ladder, using the N minus N/2 end-effect subtraction.
ShellDensity critical_dos_by_counting(const CountingConfig& config);

// Convenience: log-spaced ladder between lo and hi (inclusive), `points` values.
std::vector<double> log_spaced(double lo, double hi, int points);

}  // namespace qwalk
