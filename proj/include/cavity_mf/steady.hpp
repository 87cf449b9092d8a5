#ifndef CAVITY_MF_STEADY_HPP
#define CAVITY_MF_STEADY_HPP

// Steady states of the single-cavity model.
//
// lambda = 0 is solved in closed form (alpha = 0 pair, theta pair) or through
// the quartic in w. lambda != 0 with Delta_at = 0 reduces to a degree-six
// polynomial in w which factors into the alpha = 0 quadratic times a quartic
// for the alpha != 0 solutions. Everything else falls back to multi-start
// Newton. Every returned branch is re-checked against rhs_1d.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dynamics.hpp"
#include "errors.hpp"
#include "jacobian.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "polynomial.hpp"

namespace cavity_mf {

enum class BranchKind { TrivialAlphaZero, ThetaPlus, ThetaMinus, QuarticRoot, LambdaPoly, Numeric };
enum class Stability { Stable, Unstable, Marginal, Unknown };

inline std::string to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
        case Stability::Unknown: break;
    }
    return "unknown";
}

struct BranchLabel {
    BranchKind kind = BranchKind::Numeric;
    int index = 0;  // alpha = 0 pair: 0 is w >= 0, 1 is w <= 0

    friend bool operator==(const BranchLabel&, const BranchLabel&) = default;
};

inline std::string to_string(const BranchLabel& b) {
    switch (b.kind) {
        case BranchKind::TrivialAlphaZero: return b.index == 0 ? "alpha0_up" : "alpha0_down";
        case BranchKind::ThetaPlus: return "theta_plus";
        case BranchKind::ThetaMinus: return "theta_minus";
        case BranchKind::QuarticRoot: return "quartic_" + std::to_string(b.index);
        case BranchKind::LambdaPoly: return "lambda_poly_" + std::to_string(b.index);
        case BranchKind::Numeric: break;
    }
    return "numeric_" + std::to_string(b.index);
}

struct SteadyBranch {
    MFState state;
    BranchLabel branch;
    double g_tilde = 0.0;
    double residual = 0.0;
    Stability stability = Stability::Unknown;
};

struct TransitionPoints {
    double g1_star = 0.0;
    std::optional<double> g2_star;
};

/// Residual threshold for an accepted branch.
inline constexpr double kAcceptResidual = 1e-9;

inline SteadyBranch make_branch(const MFState& x, BranchLabel label, const EffectiveParams& p) {
    return {x, label, p.g_tilde, residual_1d(x, p), Stability::Unknown};
}

namespace detail {

inline void require_closed_form(const EffectiveParams& p, bool need_real_eta, const char* op) {
    p.validate();
    if (p.lambda != 0.0) throw DomainError(std::string(op) + " requires lambda = 0");
    if (p.gamma != 0.0) throw DomainError(std::string(op) + " requires gamma = 0");
    if (p.delta_at != 0.0) throw DomainError(std::string(op) + " requires delta_at = 0");
    if (need_real_eta && p.eta_i != 0.0) throw DomainError(std::string(op) + " requires eta_i = 0");
}

// Clamp tiny negative discriminants produced by rounding to zero.
inline double clamp_discriminant(double d, double scale) { return (d < 0.0 && d > -1e-14 * scale) ? 0.0 : d; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Newton refinement

struct RefineResult {
    MFState state;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Damped Gauss-Newton on the five residuals. With gamma = 0 fixed points are
/// not isolated (every spin length is conserved), so the constraint
/// s_x^2 + s_y^2 + w^2 = N^2 is appended as a sixth equation. Steps come from
/// a complete orthogonal decomposition, which also handles a singular
/// Jacobian; a failed step is halved until the residual decreases.
inline RefineResult try_newton_refine(const MFState& seed, const EffectiveParams& p, int max_iter = 200) {
    const double tol = 1e-12 * p.frequency_scale();
    const bool constrained = p.gamma == 0.0;
    const double n = p.n_spins;

    auto residuals = [&](const MFState& x) {
        Eigen::Matrix<double, 6, 1> f;
        f.head<5>() = to_vector(rhs_1d(x, p));
        f(5) = constrained ? (spin_norm(x) - n * n) / (2.0 * n) : 0.0;
        return f;
    };

    RefineResult out{seed, residual_1d(seed, p), 0, false};
    if (!seed.is_finite()) return out;
    MFState x = seed;
    auto f = residuals(x);
    for (int it = 0; it <= max_iter; ++it) {
        out.state = x;
        out.residual = residual_1d(x, p);
        out.iterations = it;
        if (out.residual <= tol && std::abs(f(5)) <= 1e-13 * n) {
            out.converged = true;
            return out;
        }
        if (it == max_iter) break;

        Eigen::Matrix<double, 6, 5> j = Eigen::Matrix<double, 6, 5>::Zero();
        j.topRows<5>() = jacobian(x, p);
        if (constrained) j.row(5) << 0.0, 0.0, x.s_x / n, x.s_y / n, x.w / n;
        const Vector5 step = -j.completeOrthogonalDecomposition().solve(f);
        if (!step.allFinite()) break;

        const double f_norm = f.norm();
        bool improved = false;
        for (double t = 1.0; t > 1e-10; t *= 0.5) {
            const MFState trial = to_state(to_vector(x) + t * step);
            const auto ft = residuals(trial);
            if (ft.allFinite() && ft.norm() < f_norm) {
                x = trial;
                f = ft;
                improved = true;
                break;
            }
        }
        if (!improved) {
            // Stalled at the rounding floor.
            out.converged = out.residual <= 1e3 * tol && std::abs(f(5)) <= 1e-10 * n;
            return out;
        }
    }
    return out;
}

/// Newton refinement that throws ConvergenceError on failure.
inline SteadyBranch newton_refine(const MFState& seed, const EffectiveParams& p) {
    if (!seed.is_finite()) throw DomainError("newton_refine: seed must be finite");
    const RefineResult r = try_newton_refine(seed, p);
    if (!r.converged)
        throw ConvergenceError("newton_refine: no convergence after " + std::to_string(r.iterations) +
                               " iterations (residual " + std::to_string(r.residual) + ")");
    return make_branch(r.state, {BranchKind::Numeric, 0}, p);
}

// ---------------------------------------------------------------------------
// lambda = 0, Delta_at = 0 closed forms

/// The alpha = 0 pair: s_x = -2 eta_r/g, s_y = 2 eta_i/g,
/// w = +-sqrt(N^2 - 4|eta|^2/g^2). Index 0 carries w >= 0. The field vanishes,
/// so the pair is a solution for every lambda.
inline std::vector<SteadyBranch> trivial_branch(const EffectiveParams& p) {
    p.validate();
    if (p.delta_at != 0.0) throw DomainError("trivial_branch requires delta_at = 0");
    if (p.gamma != 0.0) throw DomainError("trivial_branch requires gamma = 0");
    const double g = p.g_tilde, n = p.n_spins;
    if (g == 0.0) return {};
    const double d = detail::clamp_discriminant(n * n - 4.0 * p.eta2() / (g * g), n * n);
    if (d < 0.0) return {};
    const double w = std::sqrt(d);
    std::vector<SteadyBranch> out;
    for (int k = 0; k < 2; ++k) {
        const MFState x{0.0, 0.0, -2.0 * p.eta_r / g, 2.0 * p.eta_i / g, k == 0 ? w : -w};
        out.push_back(make_branch(x, {BranchKind::TrivialAlphaZero, k}, p));
    }
    return out;
}

/// The w = 0 pair. cos(theta) solves
///   (k^2 + D^2) cos^2 + 2 k z cos + z^2 - D^2 = 0,  z = k g N/(2 eta_r),
/// and sin(theta) follows from z + k cos = D sin.
inline std::vector<SteadyBranch> theta_branch(const EffectiveParams& p) {
    detail::require_closed_form(p, true, "theta_branch");
    const double k = p.kappa, d = p.delta_ph, g = p.g_tilde, n = p.n_spins, er = p.eta_r;
    if (er == 0.0) return {};
    const double a = k * k + d * d;
    if (a == 0.0) return {};
    const double z = k * g * n / (2.0 * er);
    const double b = 2.0 * k * z, c = z * z - d * d;
    const double disc = detail::clamp_discriminant(b * b - 4.0 * a * c, b * b + std::abs(4.0 * a * c));
    if (disc < 0.0) return {};

    std::vector<SteadyBranch> out;
    const double root = std::sqrt(disc);
    for (int sign : {+1, -1}) {
        const double cos_t = (-b + sign * root) / (2.0 * a);
        if (std::abs(cos_t) > 1.0 + 1e-12) continue;
        const double c_t = std::clamp(cos_t, -1.0, 1.0);
        double sin_t;
        if (d != 0.0) {
            sin_t = (z + k * c_t) / d;
        } else {
            sin_t = sign * std::sqrt(std::max(0.0, 1.0 - c_t * c_t));
        }
        const double gs = g * n * sin_t + 2.0 * p.eta_i;
        const double gc = g * n * c_t + 2.0 * er;
        const double den = 2.0 * (d * d + k * k);
        const MFState x{(k * gs - d * gc) / den, -(d * gs + k * gc) / den, n * c_t, -n * sin_t, 0.0};
        out.push_back(make_branch(x, {sign > 0 ? BranchKind::ThetaPlus : BranchKind::ThetaMinus, 0}, p));
    }
    return out;
}

inline TransitionPoints transition_points(const EffectiveParams& p) {
    detail::require_closed_form(p, true, "transition_points");
    TransitionPoints t;
    t.g1_star = 2.0 * std::abs(p.eta_r) / p.n_spins;
    if (p.kappa > 0.0) t.g2_star = t.g1_star * std::sqrt(1.0 + (p.delta_ph / p.kappa) * (p.delta_ph / p.kappa));
    return t;
}

// ---------------------------------------------------------------------------
// lambda = 0, general Delta_at: quartic in w

/// g^4 w^4 + 2 g^2 D_at D_ph w^3 + (D_at^2 (D_ph^2 + k^2) - N^2 g^4 + 4 g^2 |eta|^2) w^2
///   - 2 N^2 g^2 D_at D_ph w - N^2 D_at^2 (D_ph^2 + k^2)
inline Coefficients quartic_w_coefficients(const EffectiveParams& p) {
    const double g2 = p.g_tilde * p.g_tilde, n2 = p.n_spins * p.n_spins;
    const double da = p.delta_at, dp = p.delta_ph;
    const double loss = dp * dp + p.kappa * p.kappa;
    return {g2 * g2, 2.0 * g2 * da * dp, da * da * loss - n2 * g2 * g2 + 4.0 * g2 * p.eta2(),
            -2.0 * n2 * g2 * da * dp, -n2 * da * da * loss};
}

namespace detail {

/// Solutions with w = 0 for lambda = Delta_at = 0 and complex eta:
/// s = (N/2) e^{i theta}, alpha = -(g s + eta)/(D_ph - i k), where
/// psi = arg(eta) - theta solves k g N/(2|eta|) + k cos(psi) + D_ph sin(psi) = 0.
inline std::vector<MFState> rotated_theta_states(const EffectiveParams& p) {
    const double k = p.kappa, d = p.delta_ph, g = p.g_tilde, n = p.n_spins, eta = p.eta_abs();
    const double r = std::hypot(k, d);
    if (eta == 0.0 || r == 0.0) return {};
    const double ratio = -(k * g * n / (2.0 * eta)) / r;
    if (std::abs(ratio) > 1.0 + 1e-12) return {};
    const double spread = std::acos(std::clamp(ratio, -1.0, 1.0));
    const double offset = std::atan2(d, k);
    const double phi = std::arg(p.eta());
    std::vector<MFState> out;
    for (double psi : {offset + spread, offset - spread}) {
        const cplx s = 0.5 * n * std::polar(1.0, phi - psi);
        const cplx alpha = -(g * s + p.eta()) / cplx(d, -k);
        out.push_back(MFState::from_complex(alpha, s, 0.0));
    }
    return out;
}

inline bool contains_state(const std::vector<SteadyBranch>& v, const MFState& x, double radius) {
    return std::any_of(v.begin(), v.end(),
                       [&](const SteadyBranch& b) { return max_norm_distance(b.state, x) <= radius; });
}

// Polish a candidate and keep it when it satisfies the acceptance residual.
inline std::optional<MFState> polish(const MFState& candidate, const EffectiveParams& p) {
    if (!candidate.is_finite()) return std::nullopt;
    const RefineResult r = try_newton_refine(candidate, p, 30);
    const MFState& x = r.converged ? r.state : candidate;
    if (residual_1d(x, p) > kAcceptResidual) return std::nullopt;
    return x;
}

}  // namespace detail

/// Real roots of the quartic with |w| <= N, each turned back into a full
/// state through
///   D = D_at D_ph + g^2 w - i k D_at,  alpha = -eta D_at/D,  s = -g w eta/D.
/// For Delta_at = 0 the roots w != 0 are the alpha = 0 pair and the double
/// root w = 0 carries the theta pair.
inline std::vector<SteadyBranch> quartic_w_branch(const EffectiveParams& p) {
    p.validate();
    if (p.lambda != 0.0) throw DomainError("quartic_w_branch requires lambda = 0");
    if (p.gamma != 0.0) throw DomainError("quartic_w_branch requires gamma = 0");
    const double n = p.n_spins, g = p.g_tilde;
    const Coefficients c = quartic_w_coefficients(p);

    std::vector<double> ws;
    for (double w : real_roots(c)) {
        if (std::abs(w) > n * (1.0 + 1e-12)) continue;
        w = std::clamp(w, -n, n);
        if (std::none_of(ws.begin(), ws.end(), [&](double v) { return std::abs(v - w) <= 1e-12 * n; }))
            ws.push_back(w);
    }

    std::vector<MFState> candidates;
    for (double w : ws) {
        if (p.delta_at != 0.0) {
            const cplx den(p.delta_at * p.delta_ph + g * g * w, -p.kappa * p.delta_at);
            if (den == 0.0) continue;
            candidates.push_back(MFState::from_complex(-p.eta() * p.delta_at / den, -g * w * p.eta() / den, w));
        } else if (std::abs(w) > 1e-9 * n) {
            candidates.push_back(MFState::from_complex(0.0, -p.eta() / g, w));
        } else {
            for (const MFState& x : detail::rotated_theta_states(p)) candidates.push_back(x);
        }
    }

    std::vector<SteadyBranch> out;
    for (const MFState& cand : candidates) {
        const auto x = detail::polish(cand, p);
        if (!x || std::abs(x->w) > n * (1.0 + 1e-12) || detail::contains_state(out, *x, 1e-9)) continue;
        out.push_back(make_branch(*x, {BranchKind::QuarticRoot, static_cast<int>(out.size())}, p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// lambda != 0, Delta_at = 0

/// Quartic whose roots are the inversions of the alpha != 0 solutions:
///   g^2 l^2 w^4 + 4 g^2 l D w^3 + (g^2 (4 D^2 + 2 l^2 N^2 + 4 k^2) + 4|eta|^2 l^2) w^2
///   + 4 g^2 l D N^2 w + g^2 l^2 N^4 - 4 |eta|^2 l^2 N^2
inline Coefficients lambda_quartic_coefficients(const EffectiveParams& p) {
    const double g2 = p.g_tilde * p.g_tilde, l = p.lambda, l2 = l * l, d = p.delta_ph;
    const double n2 = p.n_spins * p.n_spins, e2 = p.eta2(), k2 = p.kappa * p.kappa;
    return {g2 * l2, 4.0 * g2 * l * d, g2 * (4.0 * d * d + 2.0 * l2 * n2 + 4.0 * k2) + 4.0 * e2 * l2,
            4.0 * g2 * l * d * n2, g2 * l2 * n2 * n2 - 4.0 * e2 * l2 * n2};
}

/// The full sixth-order polynomial in w: the alpha = 0 factor
/// g^2 w^2 - g^2 N^2 + 4|eta|^2 times lambda_quartic_coefficients.
inline Coefficients sextic_w_coefficients(const EffectiveParams& p) {
    const double g2 = p.g_tilde * p.g_tilde;
    const Coefficients quad{g2, 0.0, 4.0 * p.eta2() - g2 * p.n_spins * p.n_spins};
    return polymul(quad, lambda_quartic_coefficients(p));
}

/// w^2 - l^2 |a|^2 N^2 / (l^2 |a|^2 + g^2), which vanishes on every alpha != 0
/// solution.
inline double lambda_identity_residual(const MFState& x, const EffectiveParams& p) {
    const double la = p.lambda * p.lambda * x.alpha2();
    const double den = la + p.g_tilde * p.g_tilde;
    if (den == 0.0) return std::abs(x.w * x.w - p.n_spins * p.n_spins);
    return std::abs(x.w * x.w - la * p.n_spins * p.n_spins / den);
}

/// Steady states for lambda != 0 and Delta_at = 0. Real roots of the sextic
/// are mapped back to states: the alpha = 0 factor gives s = -eta/g; the
/// quartic factor gives
///   E = D_ph + l (w^2 + N^2)/(2 w),  alpha = -eta/(E - i k),
///   s = g w alpha/(2 l |alpha|^2).
/// Each candidate is polished by Newton on the full residual.
inline std::vector<SteadyBranch> lambda_poly_branch(const EffectiveParams& p) {
    p.validate();
    if (p.delta_at != 0.0) throw DomainError("lambda_poly_branch requires delta_at = 0");
    if (p.lambda == 0.0) throw DomainError("lambda_poly_branch requires lambda != 0");
    if (p.gamma != 0.0) throw DomainError("lambda_poly_branch requires gamma = 0");
    const double n = p.n_spins, g = p.g_tilde, l = p.lambda;

    std::vector<SteadyBranch> out;
    auto push = [&](const MFState& cand, BranchLabel label) {
        const auto x = detail::polish(cand, p);
        if (!x || std::abs(x->w) > n * (1.0 + 1e-12) || detail::contains_state(out, *x, 1e-9)) return;
        if (label.kind == BranchKind::LambdaPoly && lambda_identity_residual(*x, p) >= 1e-8 * n * n) return;
        out.push_back(make_branch(*x, label, p));
    };

    if (g == 0.0) {
        // Spins decouple: s = 0 and w = +-N, the field sees the shifted detuning.
        int k = 0;
        for (double w : {n, -n}) {
            const cplx alpha = -p.eta() / cplx(p.delta_ph + l * w, -p.kappa);
            push(MFState::from_complex(alpha, 0.0, w), {BranchKind::LambdaPoly, k++});
        }
        return out;
    }

    for (const auto& b : trivial_branch(p)) push(b.state, b.branch);

    int k = 0;
    for (double w : real_roots(lambda_quartic_coefficients(p))) {
        if (w == 0.0 || std::abs(w) >= n) continue;
        const double e = p.delta_ph + l * (w * w + n * n) / (2.0 * w);
        const cplx alpha = -p.eta() / cplx(e, -p.kappa);
        const double a2 = std::norm(alpha);
        if (a2 == 0.0) continue;
        const cplx s = g * w * alpha / (2.0 * l * a2);
        const std::size_t before = out.size();
        push(MFState::from_complex(alpha, s, w), {BranchKind::LambdaPoly, k});
        if (out.size() > before) ++k;
    }
    return out;
}

// ---------------------------------------------------------------------------
// General case

namespace detail {

/// Multi-start Newton for parameter sets without a polynomial reduction.
/// Seeds: the lambda = 0 quartic solutions plus a grid of spin directions,
/// each paired with the field that solves the linear cavity equation.
inline std::vector<SteadyBranch> numeric_branches(const EffectiveParams& p) {
    std::vector<MFState> seeds;
    EffectiveParams p0 = p;
    p0.lambda = 0.0;
    p0.gamma = 0.0;
    try {
        for (const auto& b : quartic_w_branch(p0)) seeds.push_back(b.state);
    } catch (const DomainError&) {
    }
    const double n = p.n_spins;
    for (int i = 0; i <= 8; ++i) {
        const double w = n * std::cos(std::numbers::pi * i / 8.0);
        const double rho = std::sqrt(std::max(0.0, n * n - w * w));
        for (int j = 0; j < (i == 0 || i == 8 ? 1 : 8); ++j) {
            const double phi = 2.0 * std::numbers::pi * j / 8.0;
            const cplx s = 0.5 * std::polar(rho, phi);
            const cplx den(p.delta_ph + p.lambda * w, -p.kappa);
            const cplx alpha = den == 0.0 ? cplx(0.0) : -(p.g_tilde * s + p.eta()) / den;
            seeds.push_back(MFState::from_complex(alpha, s, w));
        }
    }
    std::vector<SteadyBranch> out;
    for (const MFState& seed : seeds) {
        const RefineResult r = try_newton_refine(seed, p);
        if (!r.converged || r.residual > kAcceptResidual || std::abs(r.state.w) > n * (1.0 + 1e-12)) continue;
        if (contains_state(out, r.state, 1e-7)) continue;
        out.push_back(make_branch(r.state, {BranchKind::Numeric, static_cast<int>(out.size())}, p));
    }
    return out;
}

}  // namespace detail

/// Every steady state the library can find for `p`, dispatched by structure.
inline std::vector<SteadyBranch> all_branches(const EffectiveParams& p) {
    p.validate();
    if (p.gamma != 0.0) return detail::numeric_branches(p);
    if (p.lambda == 0.0) {
        if (p.delta_at == 0.0 && p.eta_i == 0.0) {
            auto out = trivial_branch(p);
            for (auto& b : theta_branch(p)) out.push_back(b);
            return out;
        }
        return quartic_w_branch(p);
    }
    if (p.delta_at == 0.0) return lambda_poly_branch(p);
    return detail::numeric_branches(p);
}

// ---------------------------------------------------------------------------
// Continuation

struct TrackedBranch {
    int track = 0;
    SteadyBranch branch;
};

struct SweepPoint {
    double g_tilde = 0.0;
    std::vector<TrackedBranch> branches;
};

struct BranchEvent {
    enum class Kind { Born, Lost };
    Kind kind = Kind::Born;
    double g_tilde = 0.0;
    int track = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<BranchEvent> events;
};

/// Evenly spaced samples; a zero-width range yields one sample.
inline std::vector<double> sweep_grid(double g_lo, double g_hi, int steps) {
    if (steps < 2) throw DomainError("sweep needs steps >= 2");
    if (!std::isfinite(g_lo) || !std::isfinite(g_hi)) throw DomainError("sweep range must be finite");
    if (g_lo == g_hi) return {g_lo};
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i) g[i] = g_lo + (g_hi - g_lo) * i / (steps - 1);
    return g;
}

/// Solves all branches at every sample (in parallel), then links them into
/// tracks: each live track seeds Newton at the next sample and claims the
/// nearest unclaimed branch. Ties go to the branch with the same sign of w,
/// then of s_x. Unclaimed branches open new tracks; unmatched tracks end.
inline SweepResult continuation_sweep(const EffectiveParams& p_base, double g_lo, double g_hi, int steps,
                                      unsigned jobs = 1) {
    const std::vector<double> grid = sweep_grid(g_lo, g_hi, steps);
    const auto solved = parallel_map(
        grid.size(), [&](std::size_t i) { return all_branches(p_base.with_g_tilde(grid[i])); }, jobs);

    SweepResult result;
    std::vector<TrackedBranch> live;
    int next_track = 0;
    auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const EffectiveParams p = p_base.with_g_tilde(grid[i]);
        const auto& branches = solved[i];
        std::vector<int> owner(branches.size(), -1);
        std::vector<TrackedBranch> next;

        for (const TrackedBranch& t : live) {
            const RefineResult r = try_newton_refine(t.branch.state, p);
            const MFState& probe = r.converged ? r.state : t.branch.state;
            int best = -1;
            double best_d = 0.0;
            for (std::size_t k = 0; k < branches.size(); ++k) {
                if (owner[k] >= 0) continue;
                const double d = max_norm_distance(branches[k].state, probe);
                if (best < 0 || d < best_d - 1e-12) {
                    best = static_cast<int>(k);
                    best_d = d;
                } else if (std::abs(d - best_d) <= 1e-12) {
                    const auto& cur = branches[best].state;
                    const auto& cand = branches[k].state;
                    const auto& ref = t.branch.state;
                    const bool cur_w = sign(cur.w) == sign(ref.w), cand_w = sign(cand.w) == sign(ref.w);
                    const bool cur_s = sign(cur.s_x) == sign(ref.s_x), cand_s = sign(cand.s_x) == sign(ref.s_x);
                    if ((cand_w && !cur_w) || (cand_w == cur_w && cand_s && !cur_s)) best = static_cast<int>(k);
                }
            }
            if (best >= 0 && best_d <= 1e-6) {
                owner[best] = t.track;
                next.push_back({t.track, branches[best]});
            } else {
                result.events.push_back({BranchEvent::Kind::Lost, grid[i], t.track});
            }
        }
        for (std::size_t k = 0; k < branches.size(); ++k) {
            if (owner[k] >= 0) continue;
            if (i > 0) result.events.push_back({BranchEvent::Kind::Born, grid[i], next_track});
            next.push_back({next_track++, branches[k]});
        }
        std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.track < b.track; });
        result.points.push_back({grid[i], next});
        live = std::move(next);
    }
    return result;
}

}  // namespace cavity_mf

#endif
