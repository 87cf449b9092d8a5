#ifndef CAVITY_MF_TWO_D_HPP
#define CAVITY_MF_TWO_D_HPP

// Square-array reductions: the homogeneous ansatz (one field per direction,
// one spin) and the two-sublattice cluster ansatz. Spins carry unit length,
// w^2 + 4|s|^2 = 1, as in the array equations.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dynamics.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "polynomial.hpp"

namespace cavity_mf {

// ---------------------------------------------------------------------------
// Homogeneous ansatz

struct HomogeneousFixedPoint {
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
    cplx s{0.0, 0.0};
    double w = 0.0;
    std::string branch;  // "drive_zero_up", "drive_zero_down", "w_zero_k"
    double residual = 0.0;
};

struct HomogeneousSolution {
    std::vector<HomogeneousFixedPoint> points;
    std::optional<double> g1_star;  // critical g_tilde_a, others fixed
};

/// Uniform lattice state built from one field per direction and one spin.
inline State2D uniform_state(const Params2D& p, cplx alpha, cplx beta, cplx s, double w) {
    State2D x(p.n_rows, p.n_cols);
    std::fill(x.alpha.begin(), x.alpha.end(), alpha);
    std::fill(x.beta.begin(), x.beta.end(), beta);
    std::fill(x.s.begin(), x.s.end(), s);
    std::fill(x.w.begin(), x.w.end(), w);
    return x;
}

/// Max-norm of the array right-hand side at a uniform state.
inline double uniform_residual(const Params2D& p, cplx alpha, cplx beta, cplx s, double w) {
    const State2D d = rhs_2d(uniform_state(p, alpha, beta, s, w), p);
    double r = 0.0;
    for (const auto& z : d.alpha) r = std::max(r, std::abs(z));
    for (const auto& z : d.beta) r = std::max(r, std::abs(z));
    for (const auto& z : d.s) r = std::max(r, std::abs(z));
    for (double v : d.w) r = std::max(r, std::abs(v));
    return r;
}

/// |s|^2 on the branch g_a alpha + g_b beta = 0 as a function of g_tilde_a:
///   |eta|^2 [(Db ga + Da gb)^2 + (ga + gb)^2 k^2]
///   / [(Db ga^2 Nc + Da gb^2 Nr)^2 + (ga^2 Nc + gb^2 Nr)^2 k^2]
inline double homogeneous_s2(const Params2D& p, double ga) {
    const double gb = p.g_tilde_b, da = p.delta_ph_a, db = p.delta_ph_b, k = p.kappa;
    const double nc = p.n_cols, nr = p.n_rows;
    const double num = std::norm(p.eta) * (std::pow(db * ga + da * gb, 2) + std::pow((ga + gb) * k, 2));
    const double den = std::pow(db * ga * ga * nc + da * gb * gb * nr, 2) + std::pow((ga * ga * nc + gb * gb * nr) * k, 2);
    return num / den;
}

/// Quartic in g_tilde_a whose positive roots satisfy homogeneous_s2 = 1/4.
inline Coefficients homogeneous_g1_coefficients(const Params2D& p) {
    const double gb = p.g_tilde_b, da = p.delta_ph_a, db = p.delta_ph_b, k2 = p.kappa * p.kappa;
    const double c = p.n_cols, d = p.n_rows, e2 = std::norm(p.eta);
    return {(db * db + k2) * c * c,
            0.0,
            2.0 * c * d * gb * gb * (da * db + k2) - 4.0 * e2 * (db * db + k2),
            -8.0 * e2 * gb * (da * db + k2),
            (da * da + k2) * (d * d * gb * gb * gb * gb - 4.0 * e2 * gb * gb)};
}

/// Smallest positive g_tilde_a with |s|^2 = 1/4, polished by Newton on the
/// quartic.
inline std::optional<double> homogeneous_g1_star(const Params2D& p) {
    const Coefficients c = homogeneous_g1_coefficients(p);
    std::optional<double> best;
    for (const auto& z : polynomial_roots(c)) {
        if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z.real()))) continue;
        double x = z.real();
        for (int it = 0; it < 8; ++it) {
            const double d = polyder_val(c, cplx{x, 0.0}).real();
            if (d == 0.0) break;
            const double step = polyval(std::span<const double>(c), x) / d;
            x -= step;
            if (std::abs(step) <= 1e-16 * std::abs(x)) break;
        }
        if (!(x > 0.0) || !std::isfinite(x)) continue;
        const double s2 = homogeneous_s2(p, x);
        if (!std::isfinite(s2) || std::abs(s2 - 0.25) > 1e-8) continue;
        if (!best || x < *best) best = x;
    }
    return best;
}

/// Steady states of the homogeneous ansatz for lambda = Delta_at = gamma = 0.
/// On the branch g_a alpha + g_b beta = 0 the spin is
///   s = -eta (ga (Db - ik) + gb (Da - ik)) / (ga^2 Nc (Db - ik) + gb^2 Nr (Da - ik))
/// with w = +-sqrt(1 - 4|s|^2). On the branch w = 0, s = e^{i phi}/2 with
///   Im(conj(s) eta B) = -Im(A)/4,  A = sum g^2 M/(D - ik),  B = sum g/(D - ik).
inline HomogeneousSolution homogeneous_2d(const Params2D& p) {
    p.validate();
    if (p.lambda != 0.0 || p.delta_at != 0.0 || p.gamma != 0.0)
        throw DomainError("homogeneous_2d requires lambda = 0, Delta_at = 0, gamma = 0");
    const cplx I{0.0, 1.0};
    const cplx za = p.delta_ph_a - I * p.kappa, zb = p.delta_ph_b - I * p.kappa;
    const double ga = p.g_tilde_a, gb = p.g_tilde_b;
    const double nc = p.n_cols, nr = p.n_rows;
    const double scale = std::max({1.0, std::abs(za), std::abs(zb), std::abs(ga) * nc, std::abs(gb) * nr, std::abs(p.eta)});

    HomogeneousSolution out;
    auto fields = [&](cplx s) {
        return std::pair{-(ga * nc * s + p.eta) / za, -(gb * nr * s + p.eta) / zb};
    };
    auto push = [&](cplx s, double w, std::string name) {
        if (za == 0.0 || zb == 0.0) return;
        const auto [a, b] = fields(s);
        HomogeneousFixedPoint f{a, b, s, w, std::move(name), 0.0};
        f.residual = uniform_residual(p, a, b, s, w);
        if (f.residual <= 1e-9 * scale) out.points.push_back(f);
    };

    const cplx den = ga * ga * nc * zb + gb * gb * nr * za;
    if (std::abs(den) > 1e-14 * scale * scale * scale) {
        const cplx s = -p.eta * (ga * zb + gb * za) / den;
        const double disc = 1.0 - 4.0 * std::norm(s);
        if (disc >= -1e-14) {
            const double w = std::sqrt(std::max(disc, 0.0));
            push(s, w, "drive_zero_up");
            if (w > 0.0) push(s, -w, "drive_zero_down");
        }
    }

    if (za != 0.0 && zb != 0.0) {
        const cplx A = ga * ga * nc / za + gb * gb * nr / zb;
        const cplx eb = p.eta * (ga / za + gb / zb);
        if (std::abs(eb) > 0.0) {
            const double ratio = -A.imag() / (2.0 * std::abs(eb));
            if (std::abs(ratio) <= 1.0) {
                const double psi = std::arg(eb), base = std::asin(ratio);
                int k = 0;
                for (double delta : {base, M_PI - base}) {
                    if (k == 1 && std::abs(ratio) == 1.0) break;
                    push(0.5 * std::polar(1.0, psi - delta), 0.0, "w_zero_" + std::to_string(k++));
                }
            }
        }
    }
    out.g1_star = homogeneous_g1_star(p);
    return out;
}

// ---------------------------------------------------------------------------
// Two-sublattice cluster

struct ClusterState {
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
    cplx s1{0.0, 0.0};
    cplx s2{0.0, 0.0};
    double w1 = 0.0;
    double w2 = 0.0;
};

using ClusterVector = Eigen::Matrix<double, 10, 1>;

inline ClusterVector to_vector(const ClusterState& x) {
    ClusterVector v;
    v << x.alpha.real(), x.alpha.imag(), x.beta.real(), x.beta.imag(), x.s1.real(), x.s1.imag(), x.s2.real(),
        x.s2.imag(), x.w1, x.w2;
    return v;
}

inline ClusterState to_cluster(const ClusterVector& v) {
    return {{v(0), v(1)}, {v(2), v(3)}, {v(4), v(5)}, {v(6), v(7)}, v(8), v(9)};
}

/// Cluster equations. Each row field sees n_cols/2 spins of either
/// sublattice and each column field n_rows/2:
///   i da/dt = (D_a - ik + l m_a (w1 + w2)) a + g_a m_a (s1 + s2) + eta
///             + l m_a b (w1 + w2 - 2)
///   i ds_j/dt = (D_at - i gamma/2 + 2 l |a + b|^2) s_j - (g_a a + g_b b) w_j
///   dw_j/dt = 4 Im(conj(s_j)(g_a a + g_b b)) - gamma (w_j + 1)
inline ClusterState rhs_cluster(const ClusterState& x, const Params2D& p) {
    const cplx I{0.0, 1.0};
    const double ma = 0.5 * p.n_cols, mb = 0.5 * p.n_rows;
    const double wsum = x.w1 + x.w2;
    const cplx ssum = x.s1 + x.s2;
    ClusterState d;
    d.alpha = -I * ((p.delta_ph_a - I * p.kappa + p.lambda * ma * wsum) * x.alpha + p.g_tilde_a * ma * ssum + p.eta +
                    p.lambda * ma * x.beta * (wsum - 2.0));
    d.beta = -I * ((p.delta_ph_b - I * p.kappa + p.lambda * mb * wsum) * x.beta + p.g_tilde_b * mb * ssum + p.eta +
                   p.lambda * mb * x.alpha * (wsum - 2.0));
    const cplx drive = p.g_tilde_a * x.alpha + p.g_tilde_b * x.beta;
    const cplx omega = p.delta_at - 0.5 * I * p.gamma + 2.0 * p.lambda * std::norm(x.alpha + x.beta);
    d.s1 = -I * (omega * x.s1 - drive * x.w1);
    d.s2 = -I * (omega * x.s2 - drive * x.w2);
    d.w1 = 4.0 * std::imag(std::conj(x.s1) * drive) - p.gamma * (x.w1 + 1.0);
    d.w2 = 4.0 * std::imag(std::conj(x.s2) * drive) - p.gamma * (x.w2 + 1.0);
    return d;
}

inline double cluster_residual(const ClusterState& x, const Params2D& p) {
    return to_vector(rhs_cluster(x, p)).cwiseAbs().maxCoeff();
}

struct ClusterFixedPoint {
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
    cplx s1{0.0, 0.0};
    cplx s2{0.0, 0.0};
    double w1 = 0.0;
    double w2 = 0.0;
    double residual = 0.0;

    ClusterState state() const { return {alpha, beta, s1, s2, w1, w2}; }
};

struct ClusterSolve {
    std::vector<ClusterFixedPoint> roots;
    int seeds_tried = 0;
    int non_converged = 0;
};

namespace detail {

inline double cluster_scale(const Params2D& p) {
    return std::max({1.0, std::abs(p.delta_ph_a), std::abs(p.delta_ph_b), std::abs(p.delta_at), std::abs(p.lambda),
                     p.kappa, p.gamma, std::abs(p.g_tilde_a) * p.n_cols, std::abs(p.g_tilde_b) * p.n_rows,
                     std::abs(p.eta)});
}

/// Residuals for the cluster solve. With gamma = 0 the two spin lengths and
/// the length of their sum are conserved and are pinned to a fully polarized
/// start: w^2 + 4|s|^2 = 1 per spin and (w1 + w2)^2 + 4|s1 + s2|^2 = 4. For
/// unit spins the last condition holds exactly when the spins coincide, and it
/// is imposed in that form because the squared length is flat there.
inline Eigen::VectorXd cluster_equations(const ClusterVector& v, const Params2D& p) {
    const bool constrained = p.gamma == 0.0;
    Eigen::VectorXd f(constrained ? 15 : 10);
    const ClusterState x = to_cluster(v);
    f.head<10>() = to_vector(rhs_cluster(x, p));
    if (constrained) {
        f(10) = 0.5 * (x.w1 * x.w1 + 4.0 * std::norm(x.s1) - 1.0);
        f(11) = 0.5 * (x.w2 * x.w2 + 4.0 * std::norm(x.s2) - 1.0);
        f(12) = x.w1 - x.w2;
        f(13) = 2.0 * (x.s1 - x.s2).real();
        f(14) = 2.0 * (x.s1 - x.s2).imag();
    }
    return f;
}

inline Eigen::MatrixXd cluster_equations_jacobian(const ClusterVector& v, const Params2D& p) {
    const Eigen::VectorXd f0 = cluster_equations(v, p);
    Eigen::MatrixXd j(f0.size(), 10);
    for (int k = 0; k < 10; ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(v(k)));
        ClusterVector plus = v, minus = v;
        plus(k) += h;
        minus(k) -= h;
        j.col(k) = (cluster_equations(plus, p) - cluster_equations(minus, p)) / (2.0 * h);
    }
    return j;
}

/// Damped Gauss-Newton on the cluster equations. Accepts when the dynamical
/// residual is at most 1e-9 and the constraints hold to 1e-12.
inline std::optional<ClusterFixedPoint> cluster_newton(const ClusterState& seed, const Params2D& p, int max_iter = 200) {
    const double tol = 1e-13 * cluster_scale(p);
    ClusterVector v = to_vector(seed);
    Eigen::VectorXd f = cluster_equations(v, p);
    auto done = [&](const Eigen::VectorXd& g) {
        const double res = g.head<10>().cwiseAbs().maxCoeff();
        const double con = g.size() > 10 ? g.tail(g.size() - 10).cwiseAbs().maxCoeff() : 0.0;
        return std::pair{res, con};
    };
    for (int it = 0; it < max_iter; ++it) {
        if (!f.allFinite()) return std::nullopt;
        const Eigen::MatrixXd j = cluster_equations_jacobian(v, p);
        const ClusterVector step = -j.completeOrthogonalDecomposition().solve(f);
        if (!step.allFinite()) return std::nullopt;
        const double f_norm = f.norm();
        bool improved = false;
        for (double t = 1.0; t > 1e-10; t *= 0.5) {
            const ClusterVector trial = v + t * step;
            const Eigen::VectorXd ft = cluster_equations(trial, p);
            if (ft.allFinite() && ft.norm() < f_norm) {
                v = trial;
                f = ft;
                improved = true;
                break;
            }
        }
        const auto [res, con] = done(f);
        const bool small_step = step.cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, v.cwiseAbs().maxCoeff());
        if (!improved || (res <= tol && con <= 1e-15) || (small_step && res <= tol)) break;
    }
    const auto [res, con] = done(f);
    if (!(res <= 1e-9) || !(con <= 1e-12)) return std::nullopt;
    const ClusterState x = to_cluster(v);
    return ClusterFixedPoint{x.alpha, x.beta, x.s1, x.s2, x.w1, x.w2, cluster_residual(x, p)};
}

inline double cluster_distance(const ClusterFixedPoint& a, const ClusterFixedPoint& b) {
    return (to_vector(a.state()) - to_vector(b.state())).cwiseAbs().maxCoeff();
}

/// Unit spin in the convention w^2 + 4|s|^2 = 1.
inline std::pair<cplx, double> unit_spin(double polar, double azimuth) {
    return {0.5 * std::sin(polar) * std::polar(1.0, azimuth), std::cos(polar)};
}

/// Fields solving the linear parts of the cavity equations for given spins.
inline void seed_fields(ClusterState& x, const Params2D& p) {
    const cplx I{0.0, 1.0};
    const cplx za = p.delta_ph_a - I * p.kappa, zb = p.delta_ph_b - I * p.kappa;
    const cplx ssum = x.s1 + x.s2;
    if (za != 0.0) x.alpha = -(p.g_tilde_a * 0.5 * p.n_cols * ssum + p.eta) / za;
    if (zb != 0.0) x.beta = -(p.g_tilde_b * 0.5 * p.n_rows * ssum + p.eta) / zb;
}

}  // namespace detail

/// Multi-start Newton on the cluster equations: `seeds` random starts with
/// both spins uniform on the unit sphere, plus 8 antiferromagnetic starts
/// (s2 = -s1, w2 = -w1). Roots closer than 1e-6 in max-norm are merged.
inline ClusterSolve cluster_2d(const Params2D& p, int seeds = 64, std::uint64_t rng_seed = 0) {
    p.validate();
    if (seeds < 0) throw DomainError("cluster_2d needs seeds >= 0");
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0), phase(0.0, 2.0 * M_PI);
    std::vector<ClusterState> starts;
    for (int k = 0; k < seeds; ++k) {
        ClusterState x;
        std::tie(x.s1, x.w1) = detail::unit_spin(std::acos(u(rng)), phase(rng));
        std::tie(x.s2, x.w2) = detail::unit_spin(std::acos(u(rng)), phase(rng));
        detail::seed_fields(x, p);
        starts.push_back(x);
    }
    for (int k = 0; k < 8; ++k) {
        ClusterState x;
        std::tie(x.s1, x.w1) = detail::unit_spin(k % 2 == 0 ? M_PI / 3.0 : 2.0 * M_PI / 3.0, M_PI * k / 4.0);
        x.s2 = -x.s1;
        x.w2 = -x.w1;
        detail::seed_fields(x, p);
        starts.push_back(x);
    }

    ClusterSolve out;
    out.seeds_tried = static_cast<int>(starts.size());
    for (const auto& x0 : starts) {
        const auto r = detail::cluster_newton(x0, p);
        if (!r) {
            ++out.non_converged;
            continue;
        }
        const bool seen = std::any_of(out.roots.begin(), out.roots.end(),
                                      [&](const ClusterFixedPoint& q) { return detail::cluster_distance(q, *r) < 1e-6; });
        if (!seen) out.roots.push_back(*r);
    }
    return out;
}

}  // namespace cavity_mf

#endif
