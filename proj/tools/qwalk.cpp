// Command-line driver: reproducible experiment runs emitting figure-ready
// CSV/JSON.  Subcommands: evolve, dos, lyapunov, fit.
//
// Exit codes: 0 success, 1 numerical failure (eigensolver, optimizer),
// 2 validation or I/O failure (bad flags, malformed files).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qwalk/dynamics.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/io.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/scaling.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/spectral_counting.hpp"
#include "qwalk/transfer.hpp"

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = 3.14159265358979323846;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

qwalk::DisorderMode parse_mode(const std::string& s) {
    if (s == "clean") return qwalk::DisorderMode::clean;
    if (s == "spatial") return qwalk::DisorderMode::spatial;
    if (s == "temporal") return qwalk::DisorderMode::temporal;
    throw qwalk::io_error("unknown mode '" + s + "' (clean|spatial|temporal)");
}

std::optional<qwalk::WallSign> parse_wall(const std::string& s) {
    if (s == "none") return std::nullopt;
    if (s == "minus") return qwalk::WallSign::minus;
    if (s == "plus") return qwalk::WallSign::plus;
    throw qwalk::io_error("unknown wall '" + s + "' (none|minus|plus)");
}

std::string wall_name(const std::optional<qwalk::WallSign>& w) {
    if (!w) return "none";
    return *w == qwalk::WallSign::minus ? "minus" : "plus";
}

// "lo:hi:points" -> inclusive grid; endpoints are pi expressions.
struct Sweep {
    double lo = 0, hi = 0;
    int points = 0;
};

Sweep parse_sweep(const std::string& s) {
    auto c1 = s.find(':');
    auto c2 = (c1 == std::string::npos) ? std::string::npos : s.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw qwalk::io_error("sweep must be lo:hi:points, got '" + s + "'");
    Sweep sw;
    sw.lo = qwalk::parse_pi_expression(s.substr(0, c1));
    sw.hi = qwalk::parse_pi_expression(s.substr(c1 + 1, c2 - c1 - 1));
    double p = qwalk::parse_double(s.substr(c2 + 1));
    sw.points = static_cast<int>(p);
    if (sw.points < 2 || p != sw.points)
        throw qwalk::io_error("sweep needs an integer point count >= 2");
    return sw;
}

std::vector<double> linear_grid(const Sweep& sw) {
    std::vector<double> out(sw.points);
    for (int i = 0; i < sw.points; ++i)
        out[i] = sw.lo + (sw.hi - sw.lo) * i / (sw.points - 1);
    return out;
}

std::vector<double> parse_angle_list(const std::string& s) {
    std::vector<double> out;
    std::size_t from = 0;
    while (true) {
        auto comma = s.find(',', from);
        out.push_back(qwalk::parse_pi_expression(s.substr(from, comma - from)));
        if (comma == std::string::npos) break;
        from = comma + 1;
    }
    return out;
}

std::string sidecar_path(const std::string& csv_path) {
    if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
        return csv_path.substr(0, csv_path.size() - 4) + ".json";
    return csv_path + ".json";
}

// ---------------------------------------------------------------- evolve ---

struct EvolveArgs {
    std::string mode = "clean";
    std::string theta = "pi/4";
    std::string dtheta = "0";
    std::uint64_t steps = 0;
    int N = 0;
    std::string wall = "none";
    std::uint64_t samples = 1;
    std::uint64_t seed = 1;
    std::uint64_t stride = 0;
    int workers = 0;
    std::string out;
};

int cmd_evolve(const EvolveArgs& a) {
    qwalk::TrajectoryConfig cfg;
    cfg.mode = parse_mode(a.mode);
    cfg.theta_bar = qwalk::parse_pi_expression(a.theta);
    cfg.dtheta = qwalk::parse_pi_expression(a.dtheta);
    cfg.steps = a.steps;
    cfg.N = a.N;
    auto wall = parse_wall(a.wall);
    if (wall) cfg.wall = (*wall == qwalk::WallSign::minus) ? qwalk::WallSign::minus
                                                          : qwalk::WallSign::plus;
    // Clean runs ignore randomness; canonicalize the seed so identical
    // experiments produce identical files regardless of the flag.
    cfg.seed = (cfg.mode == qwalk::DisorderMode::clean || cfg.dtheta == 0.0) ? 0 : a.seed;
    cfg.stride = a.stride;

    const auto res = qwalk::run_ensemble(cfg, a.samples, a.workers);

    qwalk::CsvTable t;
    t.add_meta("command", std::string("evolve"));
    t.add_meta("mode", a.mode);
    t.add_meta("theta_bar", cfg.theta_bar);
    t.add_meta("dtheta", cfg.dtheta);
    t.add_meta("steps", static_cast<double>(cfg.steps));
    t.add_meta("N", static_cast<double>(res.N));
    t.add_meta("samples", static_cast<double>(res.samples));
    t.add_meta("seed", static_cast<double>(cfg.seed));
    t.add_meta("wall", wall_name(wall));
    t.add_meta("stride", static_cast<double>(cfg.stride));
    t.columns = {"t", "n", "P", "P_stderr", "P0", "P0_stderr", "v", "v_stderr"};
    // Long format: time-series rows first (site columns NaN), then the
    // final-step distribution rows (time-series columns NaN).
    for (std::size_t k = 0; k < res.times.size(); ++k)
        t.rows.push_back({static_cast<double>(res.times[k]), kNan, kNan, kNan,
                          res.survival_mean[k], res.survival_stderr[k],
                          res.variance_mean[k], res.variance_stderr[k]});
    for (std::size_t m = 0; m < res.distribution_mean.size(); ++m)
        t.rows.push_back({static_cast<double>(cfg.steps),
                          static_cast<double>(static_cast<int>(m) - res.N / 2),
                          res.distribution_mean[m], res.distribution_stderr[m], kNan,
                          kNan, kNan, kNan});
    qwalk::write_csv(a.out, t);
    return 0;
}

// ------------------------------------------------------------------- dos ---

struct DosArgs {
    std::string theta = "pi/4";
    std::string dtheta_s = "0";
    int N = 500;
    std::uint64_t samples = 1;
    int bins = 1024;
    std::uint64_t seed = 1;
    std::string wall = "none";
    std::string method = "dense";
    double delta_lo = 3e-4, delta_hi = 1e-1;
    int delta_points = 25;
    int workers = 0;
    std::string out;
};

int cmd_dos(const DosArgs& a) {
    const double theta_bar = qwalk::parse_pi_expression(a.theta);
    const double dtheta_s = qwalk::parse_pi_expression(a.dtheta_s);
    const auto wall = parse_wall(a.wall);
    const std::uint64_t seed = (dtheta_s == 0.0) ? 0 : a.seed;

    json sidecar;
    sidecar["command"] = "dos";
    sidecar["method"] = a.method;
    json cfg_echo;
    cfg_echo["theta_bar"] = theta_bar;
    cfg_echo["dtheta_s"] = dtheta_s;
    cfg_echo["N"] = a.N;
    cfg_echo["samples"] = a.samples;
    cfg_echo["seed"] = seed;
    cfg_echo["wall"] = wall_name(wall);

    qwalk::CsvTable t;
    t.add_meta("command", std::string("dos"));
    t.add_meta("method", a.method);
    t.add_meta("theta_bar", theta_bar);
    t.add_meta("dtheta_s", dtheta_s);
    t.add_meta("N", static_cast<double>(a.N));
    t.add_meta("samples", static_cast<double>(a.samples));
    t.add_meta("seed", static_cast<double>(seed));
    t.add_meta("wall", wall_name(wall));

    if (a.method == "dense") {
        qwalk::DosConfig cfg;
        cfg.theta_bar = theta_bar;
        cfg.dtheta_s = dtheta_s;
        cfg.N = a.N;
        cfg.samples = a.samples;
        cfg.bins = a.bins;
        cfg.seed = seed;
        cfg.wall = wall;
        cfg.workers = a.workers;
        const auto h = qwalk::dos_ensemble(cfg);

        cfg_echo["bins"] = a.bins;
        t.add_meta("bins", static_cast<double>(a.bins));
        t.columns = {"omega_bin_center", "rho"};
        for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
            t.rows.push_back({0.5 * (h.edges[b] + h.edges[b + 1]), h.density[b]});

        const double M = static_cast<double>(h.samples);
        json edges;
        edges["at_zero_total"] = h.boundary_modes.at_zero;
        edges["at_pi_total"] = h.boundary_modes.at_pi;
        edges["at_zero_per_sample"] = h.boundary_modes.at_zero / M;
        edges["at_pi_per_sample"] = h.boundary_modes.at_pi / M;
        sidecar["edge_states"] = edges;
        sidecar["kept_eigenvalues"] = h.kept;
        sidecar["histogram_integral"] = h.integral();
    } else if (a.method == "counting") {
        qwalk::CountingConfig cfg;
        cfg.theta_bar = theta_bar;
        cfg.dtheta_s = dtheta_s;
        cfg.N = a.N;
        cfg.samples = a.samples;
        cfg.delta_grid = qwalk::log_spaced(a.delta_lo, a.delta_hi, a.delta_points);
        cfg.seed = seed;
        cfg.wall = wall;
        cfg.workers = a.workers;
        const auto sd = qwalk::critical_dos_by_counting(cfg);

        cfg_echo["delta_lo"] = a.delta_lo;
        cfg_echo["delta_hi"] = a.delta_hi;
        cfg_echo["delta_points"] = a.delta_points;
        t.add_meta("delta_lo", a.delta_lo);
        t.add_meta("delta_hi", a.delta_hi);
        t.add_meta("delta_points", static_cast<double>(a.delta_points));
        t.columns = {"delta_omega", "rho"};
        for (std::size_t i = 0; i < sd.delta_mid.size(); ++i)
            t.rows.push_back({sd.delta_mid[i], sd.rho[i]});
    } else {
        throw qwalk::io_error("unknown method '" + a.method + "' (dense|counting)");
    }

    sidecar["config"] = cfg_echo;
    qwalk::write_csv(a.out, t);
    qwalk::write_text_file(sidecar_path(a.out), sidecar.dump(2) + "\n");
    return 0;
}

// -------------------------------------------------------------- lyapunov ---

struct LyapunovArgs {
    std::string theta = "pi/4";
    std::string dtheta_s = "pi/4";   // comma-separated list allowed
    std::string omega;               // fixed quasi-energy (pi expression)
    std::string sweep_delta;         // lo:hi:points, log-spaced offsets below pi/2
    std::string sweep_dtheta_s;      // lo:hi:points, linear
    std::uint64_t sites = 10000000;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_lyapunov(const LyapunovArgs& a) {
    const double theta_bar = qwalk::parse_pi_expression(a.theta);

    qwalk::CsvTable t;
    t.add_meta("command", std::string("lyapunov"));
    t.add_meta("theta_bar", theta_bar);
    t.add_meta("sites", static_cast<double>(a.sites));
    t.add_meta("seed", static_cast<double>(a.seed));
    t.columns = {"omega",   "delta_omega", "dtheta_s", "gamma", "gamma_stderr",
                 "xi",      "xi_stderr",   "N",        "seed"};

    auto push_row = [&](double omega, double delta, double dth,
                        const qwalk::LyapunovResult& r) {
        const double xi_se = (r.gamma > 0.0)
                                 ? r.stderr_ / (r.gamma * r.gamma)
                                 : std::numeric_limits<double>::infinity();
        t.rows.push_back({omega, delta, dth, r.gamma, r.stderr_, r.xi, xi_se,
                          static_cast<double>(a.sites), static_cast<double>(a.seed)});
    };

    if (!a.sweep_delta.empty()) {
        // xi(delta) curves near the band-center energy, one per dtheta_s.
        const Sweep sw = parse_sweep(a.sweep_delta);
        const auto deltas = qwalk::log_spaced(sw.lo, sw.hi, sw.points);
        const auto widths = parse_angle_list(a.dtheta_s);
        t.add_meta("sweep_delta", a.sweep_delta);
        t.add_meta("dtheta_s", a.dtheta_s);
        for (std::size_t c = 0; c < widths.size(); ++c) {
            const std::uint64_t curve_seed =
                (widths[c] == 0.0) ? 0 : qwalk::stream_seed(a.seed, c);
            const auto curve = qwalk::xi_vs_energy(deltas, theta_bar, widths[c],
                                                   a.sites, curve_seed);
            for (const auto& p : curve) {
                qwalk::LyapunovResult r;
                r.gamma = p.gamma;
                r.xi = p.xi;
                r.stderr_ = p.stderr_;
                push_row(kPi / 2 - p.delta, p.delta, widths[c], r);
            }
        }
    } else if (!a.sweep_dtheta_s.empty()) {
        if (a.omega.empty())
            throw qwalk::io_error("--sweep-dtheta-s requires --omega");
        const double omega = qwalk::parse_pi_expression(a.omega);
        const double delta = std::fabs(kPi / 2 - std::fabs(omega));
        const auto widths = linear_grid(parse_sweep(a.sweep_dtheta_s));
        t.add_meta("omega", omega);
        t.add_meta("sweep_dtheta_s", a.sweep_dtheta_s);
        for (double w : widths) {
            qwalk::LyapunovConfig cfg;
            cfg.omega = qwalk::QuasiEnergy::from_omega(omega);
            cfg.theta_bar = theta_bar;
            cfg.dtheta_s = w;
            cfg.sites = a.sites;
            cfg.seed = (w == 0.0) ? 0 : a.seed;  // matched disorder across the sweep
            push_row(omega, delta, w, qwalk::lyapunov(cfg));
        }
    } else {
        if (a.omega.empty())
            throw qwalk::io_error(
                "need --omega, --sweep-delta, or --sweep-dtheta-s");
        const double omega = qwalk::parse_pi_expression(a.omega);
        const double delta = std::fabs(kPi / 2 - std::fabs(omega));
        const auto widths = parse_angle_list(a.dtheta_s);
        t.add_meta("omega", omega);
        t.add_meta("dtheta_s", a.dtheta_s);
        for (std::size_t c = 0; c < widths.size(); ++c) {
            qwalk::LyapunovConfig cfg;
            cfg.omega = qwalk::QuasiEnergy::from_omega(omega);
            cfg.theta_bar = theta_bar;
            cfg.dtheta_s = widths[c];
            cfg.sites = a.sites;
            cfg.seed = (widths[c] == 0.0) ? 0 : qwalk::stream_seed(a.seed, c);
            push_row(omega, delta, widths[c], qwalk::lyapunov(cfg));
        }
    }

    qwalk::write_csv(a.out, t);
    return 0;
}

// ------------------------------------------------------------------- fit ---

struct FitArgs {
    std::string model;         // xi | dos
    std::string input;
    std::string report;        // JSON out
    std::string collapse_out;  // CSV out
    double window_lo = 0, window_hi = 0;  // 0 -> model default
    double tau_init = 1.0;
};

int cmd_fit(const FitArgs& a) {
    if (a.model != "xi" && a.model != "dos")
        throw qwalk::io_error("unknown model '" + a.model + "' (xi|dos)");
    const bool is_xi = (a.model == "xi");
    double lo = a.window_lo > 0 ? a.window_lo
                                : (is_xi ? qwalk::kXiWindowLo : qwalk::kDosWindowLo);
    double hi = a.window_hi > 0 ? a.window_hi
                                : (is_xi ? qwalk::kXiWindowHi : qwalk::kDosWindowHi);

    const auto table = qwalk::read_csv(a.input);
    const auto delta = table.column_values("delta_omega");
    const auto value = table.column_values(is_xi ? "xi" : "rho");
    std::vector<double> werr(delta.size(), 0.0);
    const std::string err_col = is_xi ? "xi_stderr" : "rho_stderr";
    bool have_err = true;
    try {
        werr = table.column_values(err_col);
    } catch (const qwalk::io_error&) {
        have_err = false;
    }

    // Group rows into curves by the dtheta_s column when present.
    std::vector<double> curve_key(delta.size(), 0.0);
    bool have_key = true;
    try {
        curve_key = table.column_values("dtheta_s");
    } catch (const qwalk::io_error&) {
        have_key = false;
    }
    std::vector<double> keys;
    for (double k : curve_key)
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);

    std::vector<std::vector<qwalk::FitPoint>> curves(keys.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        auto c = static_cast<std::size_t>(
            std::find(keys.begin(), keys.end(), curve_key[i]) - keys.begin());
        qwalk::FitPoint p;
        p.delta = delta[i];
        p.value = value[i];
        p.stderr_ = have_err ? werr[i] : 0.0;
        curves[c].push_back(p);
    }

    std::vector<qwalk::ScalingFit> fits;
    for (const auto& c : curves)
        fits.push_back(is_xi ? qwalk::fit_xi(c, lo, hi)
                             : qwalk::fit_dos(c, a.tau_init, lo, hi));
    const auto col = qwalk::collapse(curves, fits);

    json report;
    report["command"] = "fit";
    report["model"] = a.model;
    report["input"] = a.input;
    report["window"] = {{"lo", lo}, {"hi", hi}};
    report["curves"] = json::array();
    for (std::size_t c = 0; c < fits.size(); ++c) {
        json jc;
        if (have_key) jc["dtheta_s"] = keys[c];
        jc["amplitude"] = fits[c].amplitude;
        jc["tau"] = fits[c].tau;
        jc["r_squared"] = fits[c].r_squared;
        jc["residual_norm"] = fits[c].residual_norm;
        jc["points"] = fits[c].points;
        jc["iterations"] = fits[c].iterations;
        report["curves"].push_back(jc);
    }
    report["collapse"] = {{"max_abs_log10_scatter", col.max_abs_log10_scatter},
                          {"points", col.points.size()}};
    qwalk::write_text_file(a.report, report.dump(2) + "\n");

    qwalk::CsvTable t;
    t.add_meta("command", std::string("fit"));
    t.add_meta("model", a.model);
    t.add_meta("input", a.input);
    t.add_meta("window_lo", lo);
    t.add_meta("window_hi", hi);
    t.columns = {"curve", "dtheta_s", "x", "y", "master", "log10_scatter"};
    for (const auto& p : col.points)
        t.rows.push_back({static_cast<double>(p.curve),
                          have_key ? keys[static_cast<std::size_t>(p.curve)] : kNan,
                          p.x, p.y, p.master, p.log10_scatter});
    qwalk::write_csv(a.collapse_out, t);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D two-state quantum walk toolkit: dynamics, spectra, localization"};
    app.require_subcommand(1);

    EvolveArgs ev;
    auto* evolve = app.add_subcommand("evolve", "Run walk dynamics, emit observables CSV");
    evolve->add_option("--mode", ev.mode, "clean|spatial|temporal")->capture_default_str();
    evolve->add_option("--theta", ev.theta, "mean coin angle (pi expression)")
        ->capture_default_str();
    evolve->add_option("--dtheta", ev.dtheta, "disorder width (pi expression)")
        ->capture_default_str();
    evolve->add_option("--steps", ev.steps, "number of steps")->required();
    evolve->add_option("--N", ev.N, "sites (0 = auto, no wrap-around)")
        ->capture_default_str();
    evolve->add_option("--wall", ev.wall, "none|minus|plus reflecting coin at origin")
        ->capture_default_str();
    evolve->add_option("--samples", ev.samples, "disorder realizations")
        ->capture_default_str();
    evolve->add_option("--seed", ev.seed, "base RNG seed")->capture_default_str();
    evolve->add_option("--stride", ev.stride, "recording stride (0 = auto log)")
        ->capture_default_str();
    evolve->add_option("--workers", ev.workers, "worker threads (0 = env/auto)")
        ->capture_default_str();
    evolve->add_option("--out", ev.out, "output CSV path")->required();

    DosArgs ds;
    auto* dos = app.add_subcommand("dos", "Density of states, emit histogram CSV + JSON");
    dos->add_option("--theta", ds.theta, "mean coin angle")->capture_default_str();
    dos->add_option("--dtheta-s", ds.dtheta_s, "spatial disorder width")
        ->capture_default_str();
    dos->add_option("--N", ds.N, "sites")->capture_default_str();
    dos->add_option("--samples", ds.samples, "disorder realizations")
        ->capture_default_str();
    dos->add_option("--bins", ds.bins, "histogram bins (dense method)")
        ->capture_default_str();
    dos->add_option("--seed", ds.seed, "base RNG seed")->capture_default_str();
    dos->add_option("--wall", ds.wall, "none|minus|plus")->capture_default_str();
    dos->add_option("--method", ds.method,
                    "dense (full spectrum histogram) | counting (critical window)")
        ->capture_default_str();
    dos->add_option("--delta-lo", ds.delta_lo, "counting: smallest offset")
        ->capture_default_str();
    dos->add_option("--delta-hi", ds.delta_hi, "counting: largest offset")
        ->capture_default_str();
    dos->add_option("--delta-points", ds.delta_points, "counting: ladder size")
        ->capture_default_str();
    dos->add_option("--workers", ds.workers, "worker threads")->capture_default_str();
    dos->add_option("--out", ds.out, "output CSV path")->required();

    LyapunovArgs ly;
    auto* lya = app.add_subcommand("lyapunov", "Transfer-matrix localization lengths");
    lya->add_option("--theta", ly.theta, "mean coin angle")->capture_default_str();
    lya->add_option("--dtheta-s", ly.dtheta_s, "disorder width(s), comma separated")
        ->capture_default_str();
    lya->add_option("--omega", ly.omega, "fixed quasi-energy (pi expression)");
    lya->add_option("--sweep-delta", ly.sweep_delta,
                    "lo:hi:points log-spaced offsets below pi/2");
    lya->add_option("--sweep-dtheta-s", ly.sweep_dtheta_s,
                    "lo:hi:points linear width sweep (needs --omega)");
    lya->add_option("--sites", ly.sites, "chain length")->capture_default_str();
    lya->add_option("--seed", ly.seed, "base RNG seed")->capture_default_str();
    lya->add_option("--out", ly.out, "output CSV path")->required();

    FitArgs ft;
    auto* fit = app.add_subcommand("fit", "Critical-scaling fits and collapse");
    fit->add_option("--model", ft.model, "xi|dos")->required();
    fit->add_option("--input", ft.input, "input CSV (lyapunov or dos output)")
        ->required();
    fit->add_option("--report", ft.report, "output JSON report path")->required();
    fit->add_option("--collapse", ft.collapse_out, "output collapse CSV path")
        ->required();
    fit->add_option("--window-lo", ft.window_lo, "fit window lower edge (0 = default)")
        ->capture_default_str();
    fit->add_option("--window-hi", ft.window_hi, "fit window upper edge (0 = default)")
        ->capture_default_str();
    fit->add_option("--tau-init", ft.tau_init, "dos model: initial tau")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (evolve->parsed()) return cmd_evolve(ev);
        if (dos->parsed()) return cmd_dos(ds);
        if (lya->parsed()) return cmd_lyapunov(ly);
        if (fit->parsed()) return cmd_fit(ft);
    } catch (const qwalk::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qwalk::capacity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        // numerical_error, fit_error, bad_alloc, ...
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
