#ifndef CAVITY_MF_IO_HPP
#define CAVITY_MF_IO_HPP

// CSV and JSON output, CSV reading, and re-validation of written rows.
// Numbers are written with 17 significant digits so that every double
// survives a round trip.

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymptotics.hpp"
#include "dynamics.hpp"
#include "model.hpp"
#include "regions.hpp"
#include "stability.hpp"
#include "steady.hpp"
#include "two_d.hpp"

namespace cavity_mf {

using json = nlohmann::ordered_json;

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
    os << '\n';
}

// ---------------------------------------------------------------------------
// Writers

inline void write_trajectory_csv(std::ostream& os, const std::vector<double>& t, const std::vector<MFState>& x) {
    write_line(os, {"t", "alpha_r", "alpha_i", "s_x", "s_y", "w"});
    for (std::size_t k = 0; k < t.size(); ++k)
        write_line(os, {fmt(t[k]), fmt(x[k].alpha_r), fmt(x[k].alpha_i), fmt(x[k].s_x), fmt(x[k].s_y), fmt(x[k].w)});
}

/// Spin components divided by N, for plotting on the unit Bloch sphere.
inline void write_bloch_csv(std::ostream& os, const std::vector<double>& t, const std::vector<MFState>& x, double n) {
    write_line(os, {"t", "s_x", "s_y", "w"});
    for (std::size_t k = 0; k < t.size(); ++k)
        write_line(os, {fmt(t[k]), fmt(x[k].s_x / n), fmt(x[k].s_y / n), fmt(x[k].w / n)});
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

/// One JSON object per sample: t, alpha, beta, s as [re, im] pairs and w.
inline void write_trajectory_2d_jsonl(std::ostream& os, const Trajectory2D& traj) {
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const State2D& x = traj.states[k];
        json rec;
        rec["t"] = traj.times[k];
        for (auto [name, v] : {std::pair{"alpha", &x.alpha}, {"beta", &x.beta}, {"s", &x.s}}) {
            json arr = json::array();
            for (const auto& z : *v) arr.push_back(complex_json(z));
            rec[name] = arr;
        }
        rec["w"] = x.w;
        os << rec.dump() << '\n';
    }
}

/// One row per (g_tilde, branch). The track index and the field components
/// follow the documented columns so that rows can be re-validated.
inline void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
    write_line(os, {"g_tilde", "branch", "alpha2", "w", "s_x", "s_y", "residual", "stability", "track", "alpha_r",
                    "alpha_i"});
    for (const auto& pt : sweep.points)
        for (const auto& tb : pt.branches) {
            const SteadyBranch& b = tb.branch;
            write_line(os, {fmt(pt.g_tilde), to_string(b.branch), fmt(b.state.alpha2()), fmt(b.state.w),
                            fmt(b.state.s_x), fmt(b.state.s_y), fmt(b.residual), to_string(b.stability),
                            std::to_string(tb.track), fmt(b.state.alpha_r), fmt(b.state.alpha_i)});
        }
}

inline void write_stability_csv(std::ostream& os, const SweepResult& sweep, const EffectiveParams& base) {
    std::vector<std::string> head{"g_tilde", "branch"};
    for (int k = 1; k <= 5; ++k) head.push_back("re_y" + std::to_string(k));
    for (int k = 1; k <= 5; ++k) head.push_back("im_y" + std::to_string(k));
    head.push_back("verdict");
    write_line(os, head);
    for (const auto& pt : sweep.points)
        for (const auto& tb : pt.branches) {
            const EffectiveParams p = base.with_g_tilde(pt.g_tilde);
            const Spectrum s = spectrum(tb.branch.state, p);
            std::vector<std::string> row{fmt(pt.g_tilde), to_string(tb.branch.branch)};
            for (const auto& y : s.eigenvalues) row.push_back(fmt(y.real()));
            for (const auto& y : s.eigenvalues) row.push_back(fmt(y.imag()));
            row.push_back(to_string(classify(s, p)));
            write_line(os, row);
        }
}

inline json hopf_json(const std::vector<HopfPoint>& pts) {
    json arr = json::array();
    for (const auto& h : pts) arr.push_back({{"g_tilde", h.g_tilde}, {"im_pair", h.im_pair}, {"branch", h.branch}});
    return arr;
}

inline void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
    write_line(os, {"g_tilde", "w_exact", "w_asymptotic", "alpha2_exact", "alpha2_asymptotic"});
    for (const auto& r : rows)
        write_line(os, {fmt(r.g_tilde), fmt(r.w_exact), fmt(r.w_asymptotic), fmt(r.alpha2_exact), fmt(r.alpha2_asymptotic)});
}

inline json params_json(const EffectiveParams& p) {
    return {{"delta_at", p.delta_at}, {"delta_ph", p.delta_ph}, {"lambda", p.lambda}, {"g_tilde", p.g_tilde},
            {"kappa", p.kappa},       {"gamma", p.gamma},       {"eta_r", p.eta_r},   {"eta_i", p.eta_i},
            {"n_spins", p.n_spins}};
}

inline json params_json(const Params2D& p) {
    return {{"g_tilde_a", p.g_tilde_a}, {"g_tilde_b", p.g_tilde_b}, {"delta_ph_a", p.delta_ph_a},
            {"delta_ph_b", p.delta_ph_b}, {"delta_at", p.delta_at}, {"lambda", p.lambda},
            {"kappa", p.kappa},         {"gamma", p.gamma},         {"eta", complex_json(p.eta)},
            {"n_rows", p.n_rows},       {"n_cols", p.n_cols}};
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json region_json(const RegionReport& r) {
    json out{{"parameter", r.parameter},
             {"g1_star", optional_json(r.g1_star)},
             {"g2_star", optional_json(r.g2_star)},
             {"region_II_width", r.region_II_width}};
    out["region_R_interval"] =
        r.region_R_interval ? json::array({r.region_R_interval->first, r.region_R_interval->second}) : json(nullptr);
    out["hopf_points"] = r.hopf_points;
    out["flags"] = r.flags;
    return out;
}

inline json events_json(const std::vector<BranchEvent>& events) {
    json arr = json::array();
    for (const auto& e : events)
        arr.push_back({{"kind", e.kind == BranchEvent::Kind::Born ? "born" : "lost"}, {"g_tilde", e.g_tilde},
                       {"track", e.track}});
    return arr;
}

inline json homogeneous_json(const HomogeneousSolution& h) {
    json pts = json::array();
    for (const auto& f : h.points)
        pts.push_back({{"branch", f.branch},
                       {"alpha", complex_json(f.alpha)},
                       {"beta", complex_json(f.beta)},
                       {"s", complex_json(f.s)},
                       {"w", f.w},
                       {"residual", f.residual}});
    return {{"points", pts}, {"g1_star", optional_json(h.g1_star)}};
}

inline json cluster_json(const ClusterFixedPoint& f) {
    return {{"alpha", complex_json(f.alpha)}, {"beta", complex_json(f.beta)}, {"s1", complex_json(f.s1)},
            {"s2", complex_json(f.s2)},       {"w1", f.w1},                   {"w2", f.w2},
            {"residual", f.residual}};
}

// ---------------------------------------------------------------------------
// Reading and re-validation

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k)
            if (header[k] == name) return static_cast<int>(k);
        return -1;
    }
    double number(std::size_t row, const std::string& name) const {
        const int c = column(name);
        if (c < 0) throw NumericError("missing column '" + name + "'");
        return std::stod(rows[row].at(c));
    }
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        return cells;
    };
    if (!std::getline(in, line)) return t;
    t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

struct ValidationReport {
    std::string kind;  // "sweep" or "trajectory"
    std::size_t rows = 0;
    std::size_t failures = 0;
    double max_residual = 0.0;
    double max_norm_error = 0.0;
    std::vector<std::string> messages;

    bool ok() const { return failures == 0 && rows > 0; }
};

/// Recomputes the residual and the spin sum rule of every sweep row, or the
/// spin-length drift of every trajectory sample (gamma = 0).
inline ValidationReport validate_table(const CsvTable& t, const EffectiveParams& base) {
    ValidationReport r;
    r.rows = t.rows.size();
    const double n2 = base.n_spins * base.n_spins;
    auto fail = [&](std::size_t k, const std::string& why) {
        ++r.failures;
        if (r.messages.size() < 20) r.messages.push_back("row " + std::to_string(k + 1) + ": " + why);
    };
    if (t.column("g_tilde") == 0 && t.column("alpha_r") >= 0) {
        r.kind = "sweep";
        for (std::size_t k = 0; k < t.rows.size(); ++k) {
            const EffectiveParams p = base.with_g_tilde(t.number(k, "g_tilde"));
            const MFState x{t.number(k, "alpha_r"), t.number(k, "alpha_i"), t.number(k, "s_x"), t.number(k, "s_y"),
                            t.number(k, "w")};
            const double res = residual_1d(x, p);
            r.max_residual = std::max(r.max_residual, res);
            if (!(res <= kAcceptResidual)) fail(k, "residual " + fmt(res));
            if (std::abs(x.alpha2() - t.number(k, "alpha2")) > 1e-12 * std::max(1.0, x.alpha2())) fail(k, "alpha2 mismatch");
            if (p.gamma == 0.0) {
                const double e = std::abs(spin_norm(x) - n2);
                r.max_norm_error = std::max(r.max_norm_error, e);
                if (e > 1e-8 * std::max(1.0, n2)) fail(k, "spin sum rule off by " + fmt(e));
            }
        }
    } else if (t.column("t") == 0 && t.column("alpha_r") == 1) {
        r.kind = "trajectory";
        double first = 0.0, prev_t = -INFINITY;
        for (std::size_t k = 0; k < t.rows.size(); ++k) {
            const MFState x{t.number(k, "alpha_r"), t.number(k, "alpha_i"), t.number(k, "s_x"), t.number(k, "s_y"),
                            t.number(k, "w")};
            const double time = t.number(k, "t");
            if (!(time > prev_t)) fail(k, "times not increasing");
            prev_t = time;
            if (!x.is_finite()) fail(k, "non-finite state");
            if (k == 0) first = spin_norm(x);
            if (base.gamma == 0.0) {
                const double e = std::abs(spin_norm(x) - first);
                r.max_norm_error = std::max(r.max_norm_error, e);
                if (e > 1e-8 * std::max(1.0, first)) fail(k, "spin length drift " + fmt(e));
            }
        }
    } else {
        r.kind = "unknown";
        r.failures = 1;
        r.messages.push_back("unrecognized header");
    }
    return r;
}

}  // namespace cavity_mf

#endif
