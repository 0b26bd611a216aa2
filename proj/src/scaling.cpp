#include "qwalk/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

void require_x(double x) {
    if (!(x > 0.0) || !(x < 1.0))
        throw std::domain_error("scaling model needs 0 < delta*tau < 1, got " +
                                std::to_string(x));
}

struct WPoint {
    double delta, value, w;
};

// Select points in [lo, hi], validate finiteness, convert stderr to weights.
// Zero/absent stderr means unit weight; mixing the two is allowed (weights
// are relative).
std::vector<WPoint> windowed(const std::vector<FitPoint>& pts, double lo,
                             double hi) {
    std::vector<WPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        if (p.delta < lo || p.delta > hi) continue;
        if (!std::isfinite(p.delta) || !std::isfinite(p.value) ||
            !std::isfinite(p.stderr_))
            throw fit_error("non-finite fit input");
        if (p.delta <= 0.0) throw fit_error("fit requires delta > 0");
        double w = 1.0;
        if (p.stderr_ > 0.0) w = 1.0 / (p.stderr_ * p.stderr_);
        out.push_back({p.delta, p.value, w});
    }
    return out;
}

double weighted_r2(const std::vector<double>& y, const std::vector<double>& f,
                   const std::vector<double>& w) {
    double sw = 0, sy = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        sw += w[i];
        sy += w[i] * y[i];
    }
    double ybar = sy / sw, ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        ss_res += w[i] * (y[i] - f[i]) * (y[i] - f[i]);
        ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    if (ss_tot <= 0.0) return 0.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace

double eval_dos_model(double delta, double rho0, double tau) {
    double x = delta * tau;
    require_x(x);
    double l = std::fabs(std::log(x));
    return rho0 / (x * l * l * l);
}

double eval_xi_model(double delta, double xi0, double tau) {
    double x = delta * tau;
    require_x(x);
    return xi0 * std::fabs(std::log(x));
}

ScalingFit fit_xi(const std::vector<FitPoint>& pts, double lo, double hi) {
    auto wp = windowed(pts, lo, hi);
    if (wp.size() < 3) throw fit_error("fit_xi needs >= 3 points in window");

    // xi = -xi0 * ln(delta) + xi0 * ln(1/tau): linear in t = ln(delta).
    double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (const auto& p : wp) {
        double t = std::log(p.delta);
        sw += p.w;
        st += p.w * t;
        sy += p.w * p.value;
        stt += p.w * t * t;
        sty += p.w * t * p.value;
    }
    double det = sw * stt - st * st;
    if (!(std::fabs(det) > 1e-300 * sw * stt))
        throw fit_error("fit_xi: degenerate design (all deltas equal?)");
    double slope = (sw * sty - st * sy) / det;
    double intercept = (stt * sy - st * sty) / det;
    if (!(slope < 0.0))
        throw fit_error("fit_xi: slope not negative; data is not divergent");

    ScalingFit out;
    out.model = ScalingModel::xi_log;
    out.amplitude = -slope;                        // xi0
    out.tau = std::exp(intercept / slope);         // intercept = -xi0 ln tau
    out.window_lo = lo;
    out.window_hi = hi;
    out.points = static_cast<int>(wp.size());
    out.iterations = 0;

    std::vector<double> y, f, w;
    double ss = 0;
    for (const auto& p : wp) {
        double fi = slope * std::log(p.delta) + intercept;
        y.push_back(p.value);
        f.push_back(fi);
        w.push_back(p.w);
        ss += (p.value - fi) * (p.value - fi);
    }
    out.residual_norm = std::sqrt(ss / static_cast<double>(wp.size()));
    out.r_squared = weighted_r2(y, f, w);
    if (!std::isfinite(out.tau) || out.tau <= 0.0)
        throw fit_error("fit_xi: tau estimate not finite/positive");
    return out;
}

ScalingFit fit_dos(const std::vector<FitPoint>& pts, double tau_init,
                   double lo, double hi) {
    auto wp = windowed(pts, lo, hi);
    if (wp.size() < 3) throw fit_error("fit_dos needs >= 3 points in window");
    if (!(tau_init > 0.0) || !std::isfinite(tau_init))
        throw fit_error("fit_dos: tau_init must be positive and finite");
    for (const auto& p : wp)
        if (p.value <= 0.0)
            throw fit_error("fit_dos requires positive densities");

    // Fit ln(rho) = a - ln x - 3 ln|ln x| with x = delta * e^b,
    // parameters u = (a, b) = (ln rho0, ln tau).  Residual r_i = model - data;
    // d r_i / da = 1, d r_i / db = -1 + 3/|ln x| (valid for x < 1).
    const int max_iter = 200;
    const double gtol = 1e-10;
    double a = 0.0, b = std::log(tau_init);

    // Keep x inside (0,1): shrink b until all points qualify.
    auto max_delta = lo;
    for (const auto& p : wp) max_delta = std::max(max_delta, p.delta);
    while (max_delta * std::exp(b) >= 0.9) b -= 0.5;

    std::vector<double> ly(wp.size());
    for (size_t i = 0; i < wp.size(); ++i) ly[i] = std::log(wp[i].value);

    // Initialize amplitude from the first residual sweep.
    auto eval_cost = [&](double aa, double bb, double* grad, double* hess) {
        double cost = 0;
        if (grad) grad[0] = grad[1] = 0;
        if (hess) hess[0] = hess[1] = hess[2] = 0;  // [J^T J] packed sym
        for (size_t i = 0; i < wp.size(); ++i) {
            double lx = std::log(wp[i].delta) + bb;
            if (lx >= -1e-9) return std::numeric_limits<double>::infinity();
            double al = -lx;  // |ln x|
            double model = aa - lx - 3.0 * std::log(al);
            double r = model - ly[i];
            double j0 = 1.0, j1 = -1.0 + 3.0 / al;
            cost += wp[i].w * r * r;
            if (grad) {
                grad[0] += 2.0 * wp[i].w * r * j0;
                grad[1] += 2.0 * wp[i].w * r * j1;
            }
            if (hess) {
                hess[0] += wp[i].w * j0 * j0;
                hess[1] += wp[i].w * j0 * j1;
                hess[2] += wp[i].w * j1 * j1;
            }
        }
        return cost;
    };

    // Closed-form optimal a at fixed b (linear parameter); keeps the iteration
    // robust to a bad amplitude guess.
    {
        double sw = 0, sr = 0;
        for (size_t i = 0; i < wp.size(); ++i) {
            double lx = std::log(wp[i].delta) + b;
            double al = -lx;
            sw += wp[i].w;
            sr += wp[i].w * (ly[i] + lx + 3.0 * std::log(al));
        }
        a = sr / sw;
    }

    double cost = eval_cost(a, b, nullptr, nullptr);
    std::vector<double> trace{cost};
    int iters = 0;
    double lambda = 1e-3;  // Levenberg damping
    for (; iters < max_iter; ++iters) {
        double g[2], h[3];
        eval_cost(a, b, g, h);
        double gn = std::sqrt(g[0] * g[0] + g[1] * g[1]);
        if (gn < gtol) break;
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            double h0 = h[0] * (1 + lambda), h2 = h[2] * (1 + lambda);
            double det = h0 * h2 - h[1] * h[1];
            if (!(det > 0)) {
                lambda *= 10;
                continue;
            }
            // Solve (JtJ + lambda diag) step = -grad/2 (factor 2 folded in).
            double da = -(h2 * g[0] - h[1] * g[1]) / (2 * det);
            double db = -(h0 * g[1] - h[1] * g[0]) / (2 * det);
            double na = a + da, nb = b + db;
            double nc = eval_cost(na, nb, nullptr, nullptr);
            if (nc < cost) {  // accept only strict decrease -> monotone trace
                a = na;
                b = nb;
                cost = nc;
                trace.push_back(cost);
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10;
            if (lambda > 1e12) break;
        }
        if (!accepted) break;
    }

    ScalingFit out;
    out.model = ScalingModel::dos_log_cubed;
    out.amplitude = std::exp(a);
    out.tau = std::exp(b);
    out.window_lo = lo;
    out.window_hi = hi;
    out.points = static_cast<int>(wp.size());
    out.iterations = iters;
    out.residual_trace = std::move(trace);
    if (!std::isfinite(out.amplitude) || !std::isfinite(out.tau))
        throw fit_error("fit_dos: parameters diverged");

    std::vector<double> y, f, w;
    double ss = 0;
    for (size_t i = 0; i < wp.size(); ++i) {
        double lx = std::log(wp[i].delta) + b;
        double fi = a - lx - 3.0 * std::log(-lx);
        y.push_back(ly[i]);
        f.push_back(fi);
        w.push_back(wp[i].w);
        ss += (ly[i] - fi) * (ly[i] - fi);
    }
    out.residual_norm = std::sqrt(ss / static_cast<double>(wp.size()));
    out.r_squared = weighted_r2(y, f, w);
    return out;
}

CollapseResult collapse(const std::vector<std::vector<FitPoint>>& curves,
                        const std::vector<ScalingFit>& fits) {
    if (curves.size() != fits.size())
        throw std::invalid_argument("collapse: curves/fits size mismatch");
    CollapseResult out;
    for (size_t c = 0; c < curves.size(); ++c) {
        const auto& fit = fits[c];
        if (!(fit.amplitude > 0.0) || !(fit.tau > 0.0))
            throw std::invalid_argument("collapse: fit has invalid parameters");
        for (const auto& p : curves[c]) {
            if (p.delta < fit.window_lo || p.delta > fit.window_hi) continue;
            double x = p.delta * fit.tau;
            if (!(x > 0.0) || !(x < 1.0)) continue;
            CollapsePoint cp;
            cp.curve = static_cast<int>(c);
            cp.x = x;
            cp.y = p.value / fit.amplitude;
            double l = std::fabs(std::log(x));
            cp.master = (fit.model == ScalingModel::dos_log_cubed)
                            ? 1.0 / (x * l * l * l)
                            : l;
            if (cp.y > 0.0 && cp.master > 0.0)
                cp.log10_scatter = std::log10(cp.y / cp.master);
            else
                cp.log10_scatter = std::numeric_limits<double>::quiet_NaN();
            if (std::isfinite(cp.log10_scatter))
                out.max_abs_log10_scatter = std::max(
                    out.max_abs_log10_scatter, std::fabs(cp.log10_scatter));
            out.points.push_back(cp);
        }
    }
    return out;
}

}  // namespace qwalk
