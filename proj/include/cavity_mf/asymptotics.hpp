#ifndef CAVITY_MF_ASYMPTOTICS_HPP
#define CAVITY_MF_ASYMPTOTICS_HPP

// Leading-order large-lambda solutions near the threshold g1* = 2 eta/N and a
// power-law fit for the critical exponent of |w|.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "steady.hpp"

namespace cavity_mf {

enum class Side { Above, Below };

struct AsymptoticSolution {
    double s_x0 = 0.0;
    double w0_plus = 0.0;
    double w0_minus = 0.0;
    double alpha2_leading = 0.0;  // coefficient of 1/lambda^2
    Side branch_side = Side::Above;
};

namespace detail {

inline void require_positive(double g, double eta, double n) {
    if (!(g > 0.0) || !(eta > 0.0) || !(n > 0.0)) throw DomainError("asymptotics require g_tilde, eta, N > 0");
}

}  // namespace detail

inline double g1_star(double eta, double n) { return 2.0 * eta / n; }

/// Order-zero s_x. Above threshold -2 eta/g; below it
/// (eta/g)(1 - sqrt(1 + 2 g^2 N^2/eta^2)). Both values are returned exactly at
/// the threshold, where they coincide at -N.
inline std::vector<double> sx0(double g, double eta, double n) {
    detail::require_positive(g, eta, n);
    const double g1 = g1_star(eta, n);
    std::vector<double> out;
    if (g >= g1) out.push_back(-2.0 * eta / g);
    if (g <= g1) out.push_back((eta / g) * (1.0 - std::sqrt(1.0 + 2.0 * g * g * n * n / (eta * eta))));
    return out;
}

/// The other root of the order-zero quadratic. It tends to sqrt(2) N for
/// large g and is therefore unphysical; exposed only so that this can be
/// checked.
inline double sx0_rejected(double g, double eta, double n) {
    detail::require_positive(g, eta, n);
    return (eta / g) * (1.0 + std::sqrt(1.0 + 2.0 * g * g * n * n / (eta * eta)));
}

/// Leading-order inversion, +-N sqrt(N/eta) sqrt(g - g1*) above threshold and
/// +-N sqrt(N/(3 eta)) sqrt(g1* - g) below. Returned as (plus, minus).
inline std::pair<double, double> w0(double g, double eta, double n) {
    detail::require_positive(g, eta, n);
    const double dg = g - g1_star(eta, n);
    const double a = dg >= 0.0 ? n * std::sqrt(n / eta) * std::sqrt(dg) : n * std::sqrt(n / (3.0 * eta)) * std::sqrt(-dg);
    return {a, -a};
}

/// |alpha|^2 to leading order, (1/lambda^2)(1/27)(g1* - g)(10 eta/N + 13 g)
/// below threshold and 0 above.
inline double alpha2_asymptotic(double g, double eta, double n, double lambda) {
    if (!(eta > 0.0) || !(n > 0.0)) throw DomainError("asymptotics require eta, N > 0");
    if (lambda == 0.0) throw DomainError("alpha2_asymptotic requires lambda != 0");
    const double g1 = g1_star(eta, n);
    if (g >= g1) return 0.0;
    return (g1 - g) * (10.0 * eta / n + 13.0 * g) / (27.0 * lambda * lambda);
}

inline AsymptoticSolution asymptotic_solution(double g, double eta, double n, double lambda) {
    AsymptoticSolution a;
    a.branch_side = g >= g1_star(eta, n) ? Side::Above : Side::Below;
    a.s_x0 = sx0(g, eta, n).front();
    std::tie(a.w0_plus, a.w0_minus) = w0(g, eta, n);
    a.alpha2_leading = alpha2_asymptotic(g, eta, n, lambda) * lambda * lambda;
    return a;
}

// ---------------------------------------------------------------------------
// Exponent fit

struct ExponentFit {
    double exponent = 0.0;
    double amplitude = 0.0;
};

/// Least-squares slope and intercept of log|w| against log|g - g1*|. All
/// samples must lie on one side of g1* with relative distance in
/// [1e-4, 5e-2], and there must be at least eight of them.
inline ExponentFit fit_critical_exponent(const std::vector<std::pair<double, double>>& samples, double g1) {
    if (samples.size() < 8) throw DomainError("exponent fit needs at least 8 samples");
    if (!(g1 > 0.0)) throw DomainError("exponent fit needs g1* > 0");
    const bool above = samples.front().first > g1;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [g, w] : samples) {
        const double rel = std::abs(g - g1) / g1;
        if ((g > g1) != above) throw DomainError("exponent fit samples must lie on one side of g1*");
        if (rel < 1e-4 * (1.0 - 1e-9) || rel > 5e-2 * (1.0 + 1e-9))
            throw DomainError("exponent fit samples must satisfy |g - g1*|/g1* in [1e-4, 5e-2]");
        if (w == 0.0 || !std::isfinite(w)) throw DomainError("exponent fit needs nonzero finite |w|");
        const double x = std::log(std::abs(g - g1)), y = std::log(std::abs(w));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(samples.size());
    const double den = m * sxx - sx * sx;
    if (den == 0.0) throw DomainError("exponent fit needs distinct couplings");
    const double slope = (m * sxy - sx * sy) / den;
    return {slope, std::exp((sy - slope * sx) / m)};
}

/// Log-spaced couplings on one side of g1* with relative distance in
/// [rel_lo, rel_hi].
inline std::vector<double> threshold_grid(double g1, Side side, int count, double rel_lo = 1e-4, double rel_hi = 5e-2) {
    if (count < 2) throw DomainError("threshold_grid needs count >= 2");
    std::vector<double> g(count);
    for (int k = 0; k < count; ++k) {
        const double rel = rel_lo * std::pow(rel_hi / rel_lo, double(k) / (count - 1));
        g[k] = side == Side::Above ? g1 * (1.0 + rel) : g1 * (1.0 - rel);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Exact-versus-asymptotic comparison

struct ScalingRow {
    double g_tilde = 0.0;
    double w_exact = 0.0;
    double w_asymptotic = 0.0;
    double alpha2_exact = 0.0;
    double alpha2_asymptotic = 0.0;
};

/// For each coupling and each sign of w, the exact steady state (from the
/// polynomial solver, lambda != 0, Delta_at = 0, real pump) whose inversion
/// is closest to the signed leading-order prediction. Couplings without a
/// branch of that sign are skipped.
inline std::vector<ScalingRow> scaling_rows(const EffectiveParams& p, const std::vector<double>& couplings) {
    const double eta = p.eta_r, n = p.n_spins;
    std::vector<ScalingRow> rows;
    for (double g : couplings) {
        const EffectiveParams q = p.with_g_tilde(g);
        const auto branches = lambda_poly_branch(q);
        const auto [wp, wm] = w0(g, eta, n);
        for (double target : {wp, wm}) {
            const SteadyBranch* best = nullptr;
            for (const auto& b : branches) {
                if ((b.state.w >= 0.0) != (target >= 0.0)) continue;
                if (!best || std::abs(b.state.w - target) < std::abs(best->state.w - target)) best = &b;
            }
            if (!best) continue;
            rows.push_back({g, best->state.w, target, best->state.alpha2(), alpha2_asymptotic(g, eta, n, p.lambda)});
        }
    }
    return rows;
}

}  // namespace cavity_mf

#endif
