#pragma once
#include <vector>

namespace qwalk {

// Critical scaling forms near the band-center energies (x = delta * tau):
//   density:  rho(delta)  = rho0 / (x |ln x|^3)      -- log-cubed divergence
//   length:   xi(delta)   = xi0 * |ln x|             -- logarithmic divergence
// tau plays the role of a mean free time; both models require 0 < x < 1.

enum class ScalingModel { dos_log_cubed, xi_log };

struct ScalingFit {
    ScalingModel model = ScalingModel::xi_log;
    double amplitude = 0.0;   // rho0 or xi0
    double tau = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double residual_norm = 0.0;   // rms residual in the fitted coordinates
    double r_squared = 0.0;       // in the fitted coordinates
    int points = 0;
    int iterations = 0;           // optimizer iterations (0 for closed-form fits)
    // Weighted squared-residual sum after each *accepted* optimizer step
    // (first entry: initial guess).  Strictly decreasing by construction.
    std::vector<double> residual_trace;
};

// Model evaluations; throw std::domain_error unless 0 < delta * tau < 1.
double eval_dos_model(double delta, double rho0, double tau);
double eval_xi_model(double delta, double xi0, double tau);

struct FitPoint {
    double delta = 0.0;    // energy offset
    double value = 0.0;    // xi or rho
    double stderr_ = 0.0;  // optional weight source (0 -> unit weight)
};

// Default fit windows, chosen where each estimator resolves the divergence:
// transfer-matrix xi data below 1e-3 (logarithmic regime), histogram-limited
// density data above 3e-4.
inline constexpr double kXiWindowLo = 1e-12, kXiWindowHi = 1e-3;
inline constexpr double kDosWindowLo = 3e-4, kDosWindowHi = 1e-1;

// Weighted linear regression of xi against ln(delta): slope -xi0, intercept
// -xi0 ln tau.  Only points inside [lo, hi] participate.  Throws fit_error
// for degenerate designs, non-finite values, or a non-negative slope.
ScalingFit fit_xi(const std::vector<FitPoint>& pts, double lo = kXiWindowLo,
                  double hi = kXiWindowHi);

// Damped Gauss-Newton for the density model in log parameters
// (ln rho0, ln tau): positivity is structural, the model is smooth, and the
// iteration is deterministic given the initial guess rule (tau_init
// argument, 1.0 by default).  Max 200 iterations, gradient tolerance 1e-10.
ScalingFit fit_dos(const std::vector<FitPoint>& pts, double tau_init = 1.0,
                   double lo = kDosWindowLo, double hi = kDosWindowHi);

// Rescaled-collapse bookkeeping: x = delta * tau, y = value / amplitude,
// compared against the parameter-free master curve of the model.
struct CollapsePoint {
    int curve = 0;
    double x = 0.0;         // delta * tau
    double y = 0.0;         // value / amplitude
    double master = 0.0;    // model prediction at x
    double log10_scatter = 0.0;  // log10(y / master)
};

struct CollapseResult {
    std::vector<CollapsePoint> points;
    double max_abs_log10_scatter = 0.0;
};

// Overlay each curve, rescaled by its own fit, onto the master curve.
CollapseResult collapse(const std::vector<std::vector<FitPoint>>& curves,
                        const std::vector<ScalingFit>& fits);

}  // namespace qwalk
