#ifndef CAVITY_MF_REGIONS_HPP
#define CAVITY_MF_REGIONS_HPP

// Region boundaries located by bisection on branch existence: the bistable
// interval [g1*, g2*] and the interval where the quartic has four physical
// roots (region R).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "stability.hpp"
#include "steady.hpp"

namespace cavity_mf {

struct RegionReport {
    double parameter = 0.0;  // the lambda or Delta_at value of this row
    std::optional<double> g1_star;
    std::optional<double> g2_star;
    double region_II_width = 0.0;
    std::optional<std::pair<double, double>> region_R_interval;
    std::vector<double> hopf_points;
    std::vector<std::string> flags;  // boundaries outside the swept range

    double region_R_width() const { return region_R_interval ? region_R_interval->second - region_R_interval->first : 0.0; }
};

struct Edge {
    double g_tilde = 0.0;
    bool rising = true;  // false -> true going up in g_tilde
};

/// Every change of `pred` along an evenly spaced grid on [lo, hi], each
/// bisected to 1e-13 relative.
inline std::vector<Edge> existence_edges(const std::function<bool(double)>& pred, double lo, double hi, int steps) {
    const auto grid = sweep_grid(lo, hi, steps);
    std::vector<Edge> out;
    bool prev = pred(grid.front());
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const bool cur = pred(grid[k]);
        if (cur == prev) continue;
        double a = grid[k - 1], b = grid[k];
        while (b - a > 1e-13 * std::max(1.0, std::abs(b))) {
            const double m = 0.5 * (a + b);
            (pred(m) == prev ? a : b) = m;
        }
        out.push_back({0.5 * (a + b), cur});
        prev = cur;
    }
    return out;
}

/// The alpha = 0 pair exists (Delta_at = 0, gamma = 0).
inline bool alpha_zero_exists(const EffectiveParams& p) { return !trivial_branch(p).empty(); }

/// A field-carrying steady state exists: the theta pair for lambda = 0, the
/// polynomial alpha != 0 roots otherwise (Delta_at = 0, gamma = 0).
inline bool field_branch_exists(const EffectiveParams& p) {
    if (p.lambda == 0.0) return !theta_branch(p).empty();
    for (const auto& b : lambda_poly_branch(p))
        if (b.branch.kind == BranchKind::LambdaPoly) return true;
    return false;
}

/// Four physical quartic roots (lambda = 0).
inline bool four_roots(const EffectiveParams& p) { return quartic_w_branch(p).size() >= 4; }

/// Region structure of one parameter set over g_tilde in [lo, hi]. With
/// Delta_at = 0 the report carries g1* (first appearance of the alpha = 0
/// pair) and g2* (last disappearance of the field-carrying branches); with
/// lambda = 0 it carries the region R interval. Hopf points come from a
/// continuation scan with `hopf_steps` samples, skipped when zero.
inline RegionReport region_report(const EffectiveParams& p, double lo, double hi, int steps, int hopf_steps = 0,
                                  unsigned jobs = 1) {
    if (!(hi > lo)) throw DomainError("region_report needs g_hi > g_lo");
    RegionReport r;
    auto at = [&](auto f) { return [&p, f](double g) { return f(p.with_g_tilde(g)); }; };

    if (p.delta_at == 0.0 && p.gamma == 0.0) {
        const auto a0 = existence_edges(at(alpha_zero_exists), lo, hi, steps);
        const auto fb = existence_edges(at(field_branch_exists), lo, hi, steps);
        if (alpha_zero_exists(p.with_g_tilde(lo))) r.flags.push_back("g1_star below swept range");
        else if (!a0.empty() && a0.front().rising) r.g1_star = a0.front().g_tilde;
        else r.flags.push_back("g1_star above swept range");
        if (field_branch_exists(p.with_g_tilde(hi))) r.flags.push_back("g2_star above swept range");
        else if (!fb.empty() && !fb.back().rising) r.g2_star = fb.back().g_tilde;
        else r.flags.push_back("g2_star below swept range");
        if (r.g1_star && r.g2_star) r.region_II_width = std::max(0.0, *r.g2_star - *r.g1_star);
    }

    if (p.lambda == 0.0 && p.gamma == 0.0) {
        const auto rr = existence_edges(at(four_roots), lo, hi, steps);
        const bool at_lo = four_roots(p.with_g_tilde(lo)), at_hi = four_roots(p.with_g_tilde(hi));
        if (at_lo) r.flags.push_back("region R extends below swept range");
        if (at_hi) r.flags.push_back("region R extends above swept range");
        if (!at_lo && !at_hi && rr.size() == 2) r.region_R_interval = std::pair{rr[0].g_tilde, rr[1].g_tilde};
        else if (rr.size() > 2) r.flags.push_back("region R is not a single interval");
    }

    if (hopf_steps > 0)
        for (const auto& h : hopf_scan(p, lo, hi, hopf_steps, jobs)) r.hopf_points.push_back(h.g_tilde);
    return r;
}

/// Region reports along a grid of lambda values.
inline std::vector<RegionReport> region_boundaries_lambda(const EffectiveParams& base, const std::vector<double>& lambdas,
                                                          double lo, double hi, int steps, int hopf_steps = 0,
                                                          unsigned jobs = 1) {
    return parallel_map(
        lambdas.size(),
        [&](std::size_t k) {
            EffectiveParams p = base;
            p.lambda = lambdas[k];
            RegionReport r = region_report(p, lo, hi, steps, hopf_steps);
            r.parameter = lambdas[k];
            return r;
        },
        jobs);
}

/// Region reports along a grid of Delta_at values.
inline std::vector<RegionReport> region_boundaries_delta_at(const EffectiveParams& base,
                                                            const std::vector<double>& delta_ats, double lo, double hi,
                                                            int steps, unsigned jobs = 1) {
    return parallel_map(
        delta_ats.size(),
        [&](std::size_t k) {
            EffectiveParams p = base;
            p.delta_at = delta_ats[k];
            RegionReport r = region_report(p, lo, hi, steps);
            r.parameter = delta_ats[k];
            return r;
        },
        jobs);
}

}  // namespace cavity_mf

#endif
