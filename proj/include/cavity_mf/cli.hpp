#ifndef CAVITY_MF_CLI_HPP
#define CAVITY_MF_CLI_HPP

// Command-line front end. Every subcommand reads a config file, applies
// `--set` overrides, runs one analysis and writes CSV or JSON.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numeric failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asymptotics.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "regions.hpp"
#include "stability.hpp"
#include "steady.hpp"
#include "two_d.hpp"

namespace cavity_mf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

enum class Mode { DeriveParams, Evolve, SteadyState, Sweep, Stability, Asymptotics, Cluster2D, Homogeneous2D, Validate };

struct SweepAxis {
    std::string name = "g_tilde";
    double lo = 0.0;
    double hi = 0.0;
    int steps = 2;
};

struct RunConfig {
    Mode mode = Mode::DeriveParams;
    Config config;
    SweepAxis sweep_axis;
    std::string output_path;  // empty: standard output
    std::string summary_path;
    std::string bloch_path;
    std::string orbit_path;
    std::string hopf_path;
    std::string input_path;  // validate
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool verbose = false;
    bool limit_cycle = false;
};

namespace detail {

/// Opens `path` for writing, or hands back `fallback` when the path is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
        os_ = file_.get();
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

inline void write_json(const std::string& path, std::ostream& fallback, const json& j) {
    Sink s(path, fallback);
    *s << j.dump(2) << '\n';
}

inline SweepResult classified_sweep(const EffectiveParams& p, const SweepAxis& axis, unsigned jobs) {
    SweepResult sweep = continuation_sweep(p, axis.lo, axis.hi, axis.steps, jobs);
    for (auto& pt : sweep.points) {
        const EffectiveParams q = p.with_g_tilde(pt.g_tilde);
        for (auto& tb : pt.branches) tb.branch.stability = classify(tb.branch, q);
    }
    return sweep;
}

inline void log_sweep(std::ostream& log, const SweepResult& sweep) {
    for (const auto& pt : sweep.points) {
        int stable = 0;
        for (const auto& tb : pt.branches) stable += tb.branch.stability == Stability::Stable;
        log << "g_tilde=" << fmt(pt.g_tilde) << " branches=" << pt.branches.size() << " stable=" << stable << '\n';
    }
}

inline MFState initial_state(const Config& c, const EffectiveParams& p) {
    return {c.number("alpha_r0", 0.0), c.number("alpha_i0", 0.0), c.number("s_x0", 0.0), c.number("s_y0", 0.0),
            c.number("w0", -p.n_spins)};
}

inline IntegrateOptions integrate_options(const Config& c) {
    IntegrateOptions o;
    o.rel_tol = c.number("rel_tol", o.rel_tol);
    o.abs_tol = c.number("abs_tol", o.abs_tol);
    o.samples = static_cast<std::size_t>(c.integer("samples", static_cast<long>(o.samples)));
    if (o.samples < 2) throw ConfigError("samples must be >= 2", "samples", c.line_of("samples"));
    return o;
}

inline json exponent_json(const std::vector<std::pair<double, double>>& samples, double g1) {
    try {
        const auto f = fit_critical_exponent(samples, g1);
        return {{"exponent", f.exponent}, {"amplitude", f.amplitude}, {"samples", samples.size()}};
    } catch (const DomainError& e) {
        return {{"error", e.what()}, {"samples", samples.size()}};
    }
}

inline Params2D random_params_2d(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.05, 2.0), coin(0.0, 1.0);
    std::uniform_int_distribution<int> side(1, 4);
    Params2D p;
    const bool symmetric = coin(rng) < 0.5;
    p.g_tilde_a = u(rng);
    p.g_tilde_b = symmetric ? p.g_tilde_a : u(rng);
    p.delta_ph_a = u(rng);
    p.delta_ph_b = symmetric ? p.delta_ph_a : u(rng);
    p.delta_at = symmetric ? 0.0 : u(rng);
    p.lambda = symmetric ? 0.0 : u(rng);
    p.kappa = pos(rng);
    p.gamma = coin(rng) < 0.75 ? pos(rng) : 0.0;
    p.eta = {u(rng), u(rng)};
    p.n_rows = 2 * side(rng);
    p.n_cols = symmetric ? p.n_rows : 2 * side(rng);
    return p;
}

}  // namespace detail

/// Runs one analysis. Throws ConfigError, DomainError or NumericError;
/// `run_cli` maps them onto exit codes.
inline int run(const RunConfig& rc, std::ostream& out, std::ostream& log) {
    const Config& c = rc.config;
    const std::string unit = c.text("unit", "eta");

    switch (rc.mode) {
    case Mode::DeriveParams: {
        json j = params_json(effective_params(c));
        j["unit"] = unit;
        detail::write_json(rc.output_path, out, j);
        return kExitOk;
    }
    case Mode::Evolve: {
        const EffectiveParams p = effective_params(c);
        const MFState x0 = detail::initial_state(c, p);
        const IntegrateOptions opt = detail::integrate_options(c);
        const double t_end = c.number("t_end", 100.0);
        const Trajectory traj = integrate(x0, p, t_end, opt);
        {
            detail::Sink s(rc.output_path, out);
            write_trajectory_csv(*s, traj.times, traj.states);
        }
        if (!rc.bloch_path.empty()) {
            detail::Sink s(rc.bloch_path, out);
            write_bloch_csv(*s, traj.times, traj.states, p.n_spins);
        }
        json summary{{"unit", unit}, {"t_end", t_end}, {"samples", traj.times.size()}, {"settled", is_settled(traj, p)}};
        if (traj.conservation_drift) summary["conservation_drift"] = *traj.conservation_drift;
        if (rc.limit_cycle) {
            LimitCycleOptions lo;
            lo.integrate.samples = std::max<std::size_t>(opt.samples, lo.integrate.samples);
            const auto lc = find_limit_cycle(p, x0, c.number("t_transient", t_end), c.number("t_measure", 200.0), lo);
            if (!lc) {
                summary["limit_cycle"] = nullptr;
            } else {
                summary["limit_cycle"] = {{"converged", lc->converged},   {"period", lc->period},
                                          {"w_min", lc->w_min},           {"w_max", lc->w_max},
                                          {"period_spread", lc->period_spread},
                                          {"conservation_drift", lc->conservation_drift},
                                          {"diagnostic", lc->diagnostic}};
                if (!rc.orbit_path.empty()) {
                    detail::Sink s(rc.orbit_path, out);
                    write_trajectory_csv(*s, lc->times, lc->orbit);
                }
            }
        }
        if (!rc.summary_path.empty() || rc.verbose) detail::write_json(rc.summary_path, log, summary);
        return kExitOk;
    }
    case Mode::SteadyState: {
        const EffectiveParams p = effective_params(c);
        const SweepResult one = detail::classified_sweep(p, {"g_tilde", p.g_tilde, p.g_tilde, 2}, 1);
        detail::Sink s(rc.output_path, out);
        write_sweep_csv(*s, one);
        if (rc.verbose) detail::log_sweep(log, one);
        return kExitOk;
    }
    case Mode::Sweep:
    case Mode::Stability: {
        const EffectiveParams p = effective_params(c);
        const SweepResult sweep = detail::classified_sweep(p, rc.sweep_axis, rc.jobs);
        if (rc.verbose) detail::log_sweep(log, sweep);
        {
            detail::Sink s(rc.output_path, out);
            if (rc.mode == Mode::Sweep) write_sweep_csv(*s, sweep);
            else write_stability_csv(*s, sweep, p);
        }
        json summary{{"unit", unit}, {"params", params_json(p)}, {"events", events_json(sweep.events)}};
        if (p.lambda == 0.0 && p.delta_at == 0.0 && p.gamma == 0.0 && p.eta_i == 0.0) {
            const auto tp = transition_points(p);
            summary["transition_points"] = {{"g1_star", tp.g1_star}, {"g2_star", optional_json(tp.g2_star)}};
        }
        const auto& ax = rc.sweep_axis;
        if (ax.hi > ax.lo) summary["regions"] = region_json(region_report(p, ax.lo, ax.hi, ax.steps));
        if (c.has("lambda_grid")) {
            json rows = json::array();
            for (const auto& r : region_boundaries_lambda(p, c.list("lambda_grid"), ax.lo, ax.hi, ax.steps, 0, rc.jobs))
                rows.push_back(region_json(r));
            summary["lambda_boundaries"] = rows;
        }
        if (c.has("delta_at_grid")) {
            json rows = json::array();
            for (const auto& r : region_boundaries_delta_at(p, c.list("delta_at_grid"), ax.lo, ax.hi, ax.steps, rc.jobs))
                rows.push_back(region_json(r));
            summary["delta_at_boundaries"] = rows;
        }
        if (rc.mode == Mode::Stability) {
            const int hopf_steps = static_cast<int>(c.integer("hopf_steps", ax.steps));
            const json hopf = ax.hi > ax.lo ? hopf_json(hopf_scan(p, ax.lo, ax.hi, hopf_steps, rc.jobs)) : json::array();
            summary["hopf_points"] = hopf;
            if (!rc.hopf_path.empty()) detail::write_json(rc.hopf_path, log, hopf);
        }
        if (!rc.summary_path.empty() || rc.verbose) detail::write_json(rc.summary_path, log, summary);
        return kExitOk;
    }
    case Mode::Asymptotics: {
        const EffectiveParams p = effective_params(c);
        if (p.lambda == 0.0 || p.delta_at != 0.0 || p.eta_i != 0.0 || p.gamma != 0.0)
            throw ConfigError("asymptotics needs lambda != 0, delta_at = 0, eta_i = 0, gamma = 0");
        const double g1 = g1_star(p.eta_r, p.n_spins);
        const int count = static_cast<int>(c.integer("threshold_count", 16));
        std::vector<ScalingRow> rows;
        json fits;
        for (Side side : {Side::Below, Side::Above}) {
            const auto part = scaling_rows(p, threshold_grid(g1, side, count));
            std::vector<std::pair<double, double>> up, down;
            for (const auto& r : part) (r.w_exact >= 0.0 ? up : down).emplace_back(r.g_tilde, std::abs(r.w_exact));
            const std::string name = side == Side::Above ? "above" : "below";
            fits[name] = {{"w_plus", detail::exponent_json(up, g1)}, {"w_minus", detail::exponent_json(down, g1)}};
            rows.insert(rows.end(), part.begin(), part.end());
        }
        std::sort(rows.begin(), rows.end(), [](const ScalingRow& a, const ScalingRow& b) {
            return a.g_tilde < b.g_tilde || (a.g_tilde == b.g_tilde && a.w_exact > b.w_exact);
        });
        {
            detail::Sink s(rc.output_path, out);
            write_scaling_csv(*s, rows);
        }
        json summary{{"unit", unit}, {"g1_star", g1}, {"fits", fits}};
        if (!rc.summary_path.empty() || rc.verbose) detail::write_json(rc.summary_path, log, summary);
        return kExitOk;
    }
    case Mode::Cluster2D: {
        const long draws = c.integer("draws", 0);
        const int seeds = static_cast<int>(c.integer("seeds", 64));
        std::vector<Params2D> sets;
        if (draws > 0) {
            std::mt19937_64 rng(rc.seed);
            for (long k = 0; k < draws; ++k) sets.push_back(detail::random_params_2d(rng));
        } else {
            sets.push_back(params_2d(c));
        }
        const auto solved = parallel_map(
            sets.size(), [&](std::size_t k) { return cluster_2d(sets[k], seeds, rc.seed + k); }, rc.jobs);
        double max_dw = 0.0, max_ds = 0.0, max_dab = 0.0;
        long roots = 0, failed = 0;
        detail::Sink s(rc.output_path, out);
        for (std::size_t k = 0; k < sets.size(); ++k) {
            failed += solved[k].non_converged;
            for (const auto& f : solved[k].roots) {
                max_dw = std::max(max_dw, std::abs(f.w1 - f.w2));
                max_ds = std::max(max_ds, std::abs(f.s1 - f.s2));
                max_dab = std::max(max_dab, std::abs(f.alpha - f.beta));
                ++roots;
                json rec = cluster_json(f);
                rec["draw"] = k;
                *s << rec.dump() << '\n';
            }
        }
        json summary{{"draws", sets.size()},          {"roots", roots},
                     {"non_converged_seeds", failed}, {"max_abs_w1_minus_w2", max_dw},
                     {"max_abs_s1_minus_s2", max_ds}, {"max_abs_alpha_minus_beta", max_dab}};
        if (draws == 0) summary["params"] = params_json(sets.front());
        detail::write_json(rc.summary_path, log, summary);
        return kExitOk;
    }
    case Mode::Homogeneous2D: {
        const Params2D p = params_2d(c);
        json j = homogeneous_json(homogeneous_2d(p));
        j["params"] = params_json(p);
        detail::write_json(rc.output_path, out, j);
        return kExitOk;
    }
    case Mode::Validate: {
        const EffectiveParams p = effective_params(c);
        std::ifstream in(rc.input_path);
        if (!in) throw ConfigError("cannot open '" + rc.input_path + "'");
        const ValidationReport r = validate_table(read_csv(in), p);
        json j{{"kind", r.kind},
               {"rows", r.rows},
               {"failures", r.failures},
               {"max_residual", r.max_residual},
               {"max_norm_error", r.max_norm_error},
               {"messages", r.messages}};
        detail::write_json(rc.output_path, out, j);
        return r.ok() ? kExitOk : kExitNumeric;
    }
    }
    return kExitOk;
}

/// Parses the command line, runs the subcommand and maps failures to exit
/// codes.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Mean-field simulator and bifurcation analyzer for driven-dissipative cavity arrays", "cavity-mf"};
    app.require_subcommand(1);

    RunConfig rc;
    std::string config_path;
    std::vector<std::string> overrides;
    long jobs = default_jobs();

    struct Spec {
        const char* name;
        Mode mode;
        const char* help;
    };
    const Spec specs[] = {
        {"derive-params", Mode::DeriveParams, "print the effective parameters as JSON"},
        {"evolve", Mode::Evolve, "integrate the single-cavity equations"},
        {"steady", Mode::SteadyState, "all steady states at one coupling"},
        {"sweep", Mode::Sweep, "steady branches over a coupling range"},
        {"stability", Mode::Stability, "spectra and Hopf points over a coupling range"},
        {"asymptotics", Mode::Asymptotics, "exact versus leading-order scaling near threshold"},
        {"cluster2d", Mode::Cluster2D, "two-sublattice cluster fixed points"},
        {"homog2d", Mode::Homogeneous2D, "homogeneous array fixed points and threshold"},
        {"validate", Mode::Validate, "re-check a written sweep or trajectory CSV"},
    };
    std::vector<std::pair<CLI::App*, Mode>> subs;
    for (const auto& sp : specs) {
        CLI::App* sub = app.add_subcommand(sp.name, sp.help);
        sub->add_option("-c,--config", config_path, "config file")->required();
        sub->add_option("--set", overrides, "override a config key (key=value)")->take_all();
        sub->add_option("-o,--output", rc.output_path, "output file (default: standard output)");
        sub->add_option("--jobs", jobs, "worker threads (default: CAVITY_MF_JOBS or 1)")->check(CLI::PositiveNumber);
        sub->add_flag("-v,--verbose", rc.verbose, "per-point progress and summary on standard error");
        switch (sp.mode) {
        case Mode::Evolve:
            sub->add_option("--bloch", rc.bloch_path, "Bloch-sphere CSV");
            sub->add_flag("--limit-cycle", rc.limit_cycle, "detect a periodic orbit after the run");
            sub->add_option("--orbit", rc.orbit_path, "one period of the detected orbit as CSV");
            sub->add_option("--summary", rc.summary_path, "JSON summary");
            break;
        case Mode::Sweep:
        case Mode::Asymptotics:
        case Mode::Cluster2D:
            sub->add_option("--summary", rc.summary_path, "JSON summary");
            break;
        case Mode::Stability:
            sub->add_option("--summary", rc.summary_path, "JSON summary");
            sub->add_option("--hopf", rc.hopf_path, "Hopf points JSON");
            break;
        case Mode::Validate:
            sub->add_option("input", rc.input_path, "CSV written by sweep, steady or evolve")->required();
            break;
        default:
            break;
        }
        if (sp.mode == Mode::Cluster2D) sub->add_option("--seed", rc.seed, "random seed");
        subs.emplace_back(sub, sp.mode);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }
    for (const auto& [sub, mode] : subs)
        if (sub->parsed()) rc.mode = mode;
    rc.jobs = static_cast<unsigned>(jobs);

    try {
        rc.config = Config::load(config_path);
        for (const auto& o : overrides) rc.config.set(o);
        const Config& c = rc.config;
        if (c.has("seed") && rc.seed == 0) rc.seed = static_cast<std::uint64_t>(c.integer("seed", 0));
        rc.sweep_axis.lo = c.number("g_lo", 0.0);
        rc.sweep_axis.hi = c.number("g_hi", rc.sweep_axis.lo);
        rc.sweep_axis.steps = static_cast<int>(c.integer("g_steps", 2));
        if (rc.sweep_axis.steps < 2) throw ConfigError("g_steps must be >= 2", "g_steps", c.line_of("g_steps"));
        if (rc.sweep_axis.hi < rc.sweep_axis.lo) throw ConfigError("g_hi must be >= g_lo", "g_hi", c.line_of("g_hi"));
        return run(rc, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace cavity_mf

#endif
