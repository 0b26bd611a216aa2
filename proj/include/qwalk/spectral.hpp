#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/core.hpp"

namespace qwalk {

// Eigenphases of the one-step operator: omega_lambda in (-pi, pi] with
// U psi = e^{i omega} psi.  The branch keeps +pi (a physical boundary-mode
// energy) and never emits -pi.
struct Spectrum {
    std::vector<double> phases;   // size 2N, unsorted
    double max_residual = 0.0;    // max | |lambda| - 1 | over eigenvalues
    int N = 0;                    // number of lattice sites
};

// Dense one-step operator on a ring.  Every coin (rotation or reflecting) is
// real orthogonal and the shift is a permutation, so the matrix is real
// orthogonal; complex eigenvalues appear in conjugate pairs.
// Throws capacity_error if N exceeds `max_sites` (dense assembly cap).
Eigen::MatrixXd build_step_matrix(const CoinField& field, const BoundaryConfig& boundary,
                                  int max_sites = 20000);

// All eigenphases of a dense orthogonal step matrix (non-symmetric real
// eigensolver).  Throws numerical_error on non-convergence and
// std::invalid_argument if U is not orthogonal to 1e-10.
Spectrum eigenphases(const Eigen::MatrixXd& U);

// Band-structure density of states of the uniform walk,
//   rho(omega) = |sin omega| / (2 pi sqrt(cos^2 theta - cos^2 omega)),
// zero outside the bands, +infinity exactly at a band edge.  Integrates to 1
// over (-pi, pi].
double clean_dos(double omega, double theta);

struct EdgeCounts {
    int at_zero = 0;
    int at_pi = 0;
};

// Count eigenphases within tol of 0 and of +-pi.
EdgeCounts detect_edge_states(const Spectrum& spec, double tol);

// Tolerance rule: 1e-8 for clean spectra; for disordered spectra scale with
// the mean level spacing, tol = max(1e-8, 0.1 * 2pi / (2N)).
double default_edge_tol(int N, bool disordered);

// Invariance of the eigenphase multiset under omega -> -omega and
// omega -> omega + pi (mod 2pi).  Reports the worst matching distance for
// each map; ok(tol) checks both.
struct SymmetryReport {
    double worst_negation = 0.0;
    double worst_half_turn = 0.0;
    double tol = 0.0;
    bool passed = false;
    bool ok(double t) const { return worst_negation <= t && worst_half_turn <= t; }
};
SymmetryReport check_quadruplet_symmetry(const Spectrum& spec, double tol);

// Disorder-averaged eigenphase histogram.
struct DosHistogram {
    std::vector<double> edges;    // bins + 1 monotone edges over (-pi, pi]
    std::vector<double> density;  // normalized so the bin-sum integral is 1
    std::uint64_t samples = 0;
    int N = 0;
    EdgeCounts boundary_modes;    // states excluded from the histogram (total over samples)
    std::uint64_t kept = 0;       // eigenvalues contributing to the histogram

    double bin_width() const { return edges[1] - edges[0]; }
    double integral() const;      // sum(density) * bin_width
    // Largest bin density among bins whose centers lie within
    // |omega -+ center| < half_width (both symmetric windows).
    double peak_density_near(double center, double half_width) const;
};

struct DosConfig {
    double theta_bar = 0.0;
    double dtheta_s = 0.0;        // spatial disorder width
    int N = 500;
    std::uint64_t samples = 1;
    int bins = 1024;
    std::uint64_t seed = 0;
    std::optional<WallSign> wall; // reflecting coin at the origin
    bool exclude_boundary_modes = true;
    int workers = 0;
};

// Ensemble density of states over spatial-disorder realizations on a ring.
//
// Internally this diagonalizes the real symmetric fold H = (U + U^T)/2,
// whose eigenvalues are cos(omega) (one per eigenstate): the spectrum of a
// chiral ring is exactly symmetric under omega -> -omega, so each folded
// |omega| is split 0.5/0.5 onto the +|omega| and -|omega| bins.  This is
// validated against the signed non-symmetric route in the tests and is
// several times faster, which is what makes large ensembles practical.
//
// Wall-localized modes pinned at omega = 0/pi are detected on the cos(omega)
// scale (|cos omega -+ 1| < 1e-12, backward-error limited rather than
// level-spacing limited) and excluded from the histogram by default so the
// delta functions do not smear into density bins.
DosHistogram dos_ensemble(const DosConfig& config);

}  // namespace qwalk
