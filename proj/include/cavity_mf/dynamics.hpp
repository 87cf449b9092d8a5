#ifndef CAVITY_MF_DYNAMICS_HPP
#define CAVITY_MF_DYNAMICS_HPP

// Mean-field equations of motion and their time integration.
//
// Normalization: the single-cavity model uses the collective spin of length N
// (s_x^2 + s_y^2 + w^2 = N^2). The 2D array uses one spin per site with
// w^2 + 4|s|^2 = 1. A 1x1 array therefore corresponds to the single-cavity
// model with N = 1; the two conventions are never mixed inside a function.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "errors.hpp"
#include "model.hpp"

namespace cavity_mf {

using cplx = std::complex<double>;

/// The five real single-cavity variables. alpha = alpha_r + i alpha_i is the
/// cavity amplitude, s = (s_x - i s_y)/2 the collective lowering-spin
/// expectation and w the inversion.
struct MFState {
    double alpha_r = 0.0;
    double alpha_i = 0.0;
    double s_x = 0.0;
    double s_y = 0.0;
    double w = 0.0;

    static constexpr std::size_t size = 5;

    std::array<double, 5> to_array() const { return {alpha_r, alpha_i, s_x, s_y, w}; }
    static MFState from_array(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
    template <typename Range>
    static MFState from_range(const Range& v) {
        return {v[0], v[1], v[2], v[3], v[4]};
    }

    cplx alpha() const { return {alpha_r, alpha_i}; }
    cplx s() const { return {0.5 * s_x, -0.5 * s_y}; }
    double alpha2() const { return alpha_r * alpha_r + alpha_i * alpha_i; }

    static MFState from_complex(cplx alpha, cplx s, double w) {
        return {alpha.real(), alpha.imag(), 2.0 * s.real(), -2.0 * s.imag(), w};
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : to_array()) m = std::max(m, std::abs(v));
        return m;
    }

    bool is_finite() const {
        for (double v : to_array())
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend MFState operator+(const MFState& a, const MFState& b) {
        return {a.alpha_r + b.alpha_r, a.alpha_i + b.alpha_i, a.s_x + b.s_x, a.s_y + b.s_y, a.w + b.w};
    }
    friend MFState operator-(const MFState& a, const MFState& b) {
        return {a.alpha_r - b.alpha_r, a.alpha_i - b.alpha_i, a.s_x - b.s_x, a.s_y - b.s_y, a.w - b.w};
    }
    friend MFState operator*(double c, const MFState& a) {
        return {c * a.alpha_r, c * a.alpha_i, c * a.s_x, c * a.s_y, c * a.w};
    }
    friend bool operator==(const MFState&, const MFState&) = default;
};

inline double max_norm_distance(const MFState& a, const MFState& b) { return (a - b).max_abs(); }

/// s_x^2 + s_y^2 + w^2; equals N^2 on every gamma = 0 trajectory.
inline double spin_norm(const MFState& x) { return x.s_x * x.s_x + x.s_y * x.s_y + x.w * x.w; }

/// Right-hand side of the real single-cavity equations with pump:
///   da_r/dt = -k a_r + (l w + D_ph) a_i - g/2 s_y + eta_i
///   da_i/dt = -(l w + D_ph) a_r - k a_i - g/2 s_x - eta_r
///   ds_x/dt = -2 g w a_i - (D_at + 2 l |a|^2) s_y
///   ds_y/dt = -2 g w a_r + (D_at + 2 l |a|^2) s_x
///   dw/dt   =  2 g (a_r s_y + a_i s_x)
/// Spin decay adds -gamma/2 on s_x, s_y and -gamma (w + N) on w.
inline MFState rhs_1d(const MFState& x, const EffectiveParams& p) {
    const double detune = p.lambda * x.w + p.delta_ph;
    const double omega = p.delta_at + 2.0 * p.lambda * x.alpha2();
    MFState d;
    d.alpha_r = -p.kappa * x.alpha_r + detune * x.alpha_i - 0.5 * p.g_tilde * x.s_y + p.eta_i;
    d.alpha_i = -detune * x.alpha_r - p.kappa * x.alpha_i - 0.5 * p.g_tilde * x.s_x - p.eta_r;
    d.s_x = -2.0 * p.g_tilde * x.w * x.alpha_i - omega * x.s_y;
    d.s_y = -2.0 * p.g_tilde * x.w * x.alpha_r + omega * x.s_x;
    d.w = 2.0 * p.g_tilde * (x.alpha_r * x.s_y + x.alpha_i * x.s_x);
    if (p.gamma != 0.0) {
        d.s_x -= 0.5 * p.gamma * x.s_x;
        d.s_y -= 0.5 * p.gamma * x.s_y;
        d.w -= p.gamma * (x.w + p.n_spins);
    }
    return d;
}

/// Max-norm of the right-hand side; zero exactly at a fixed point.
inline double residual_1d(const MFState& x, const EffectiveParams& p) { return rhs_1d(x, p).max_abs(); }

// ---------------------------------------------------------------------------
// 2D array

/// Fields on every row (alpha_i) and column (beta_nu) plus one spin per site.
/// Site (i, nu) is stored row-major at i * n_cols + nu.
struct State2D {
    int n_rows = 1;
    int n_cols = 1;
    std::vector<cplx> alpha;
    std::vector<cplx> beta;
    std::vector<cplx> s;
    std::vector<double> w;

    State2D() = default;
    State2D(int rows, int cols)
        : n_rows(rows), n_cols(cols), alpha(rows), beta(cols), s(std::size_t(rows) * cols),
          w(std::size_t(rows) * cols, 0.0) {}

    std::size_t site(int i, int nu) const { return std::size_t(i) * n_cols + nu; }
    std::size_t sites() const { return std::size_t(n_rows) * n_cols; }

    bool consistent_with(const Params2D& p) const {
        return n_rows == p.n_rows && n_cols == p.n_cols && alpha.size() == std::size_t(n_rows) &&
               beta.size() == std::size_t(n_cols) && s.size() == sites() && w.size() == sites();
    }

    std::size_t flat_size() const { return 2 * (alpha.size() + beta.size() + s.size()) + w.size(); }

    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(flat_size());
        for (const auto* v : {&alpha, &beta, &s})
            for (const cplx& z : *v) {
                out.push_back(z.real());
                out.push_back(z.imag());
            }
        out.insert(out.end(), w.begin(), w.end());
        return out;
    }

    void unflatten(const std::vector<double>& in) {
        if (in.size() != flat_size()) throw std::invalid_argument("State2D::unflatten: size mismatch");
        std::size_t k = 0;
        for (auto* v : {&alpha, &beta, &s})
            for (cplx& z : *v) {
                z = {in[k], in[k + 1]};
                k += 2;
            }
        for (double& x : w) x = in[k++];
    }

    /// Per-site w^2 + 4|s|^2.
    double local_norm(std::size_t k) const { return w[k] * w[k] + 4.0 * std::norm(s[k]); }

    /// W^2 + 4|Sigma|^2 with W, Sigma summed over all sites.
    double global_norm() const {
        double W = 0.0;
        cplx S{0.0, 0.0};
        for (std::size_t k = 0; k < sites(); ++k) {
            W += w[k];
            S += s[k];
        }
        return W * W + 4.0 * std::norm(S);
    }
};

/// Right-hand side of the array equations. Repeated spatial indices are
/// summed, so the mode equations read
///   i da_i/dt = (D_ph^a - i k + l sum_nu w_inu) a_i + g_a sum_nu s_inu + eta
///               + l sum_nu b_nu (w_inu - 1)
/// and symmetrically for b_nu. The -1 inside the bracket is summed with it,
/// contributing -l sum_nu b_nu.
inline State2D rhs_2d(const State2D& x, const Params2D& p) {
    if (!x.consistent_with(p)) throw std::invalid_argument("rhs_2d: state shape does not match Params2D");
    const cplx I{0.0, 1.0};
    State2D d(x.n_rows, x.n_cols);

    for (int i = 0; i < x.n_rows; ++i) {
        double wsum = 0.0;
        cplx ssum{0.0, 0.0}, cross{0.0, 0.0};
        for (int nu = 0; nu < x.n_cols; ++nu) {
            const std::size_t k = x.site(i, nu);
            wsum += x.w[k];
            ssum += x.s[k];
            cross += x.beta[nu] * (x.w[k] - 1.0);
        }
        const cplx rhs = (p.delta_ph_a - I * p.kappa + p.lambda * wsum) * x.alpha[i] +
                         p.g_tilde_a * ssum + p.eta + p.lambda * cross;
        d.alpha[i] = -I * rhs;
    }
    for (int nu = 0; nu < x.n_cols; ++nu) {
        double wsum = 0.0;
        cplx ssum{0.0, 0.0}, cross{0.0, 0.0};
        for (int i = 0; i < x.n_rows; ++i) {
            const std::size_t k = x.site(i, nu);
            wsum += x.w[k];
            ssum += x.s[k];
            cross += x.alpha[i] * (x.w[k] - 1.0);
        }
        const cplx rhs = (p.delta_ph_b - I * p.kappa + p.lambda * wsum) * x.beta[nu] +
                         p.g_tilde_b * ssum + p.eta + p.lambda * cross;
        d.beta[nu] = -I * rhs;
    }
    for (int i = 0; i < x.n_rows; ++i)
        for (int nu = 0; nu < x.n_cols; ++nu) {
            const std::size_t k = x.site(i, nu);
            const cplx field = x.alpha[i] + x.beta[nu];
            const cplx drive = p.g_tilde_a * x.alpha[i] + p.g_tilde_b * x.beta[nu];
            const cplx omega = p.delta_at - 0.5 * I * p.gamma + 2.0 * p.lambda * std::norm(field);
            d.s[k] = -I * (omega * x.s[k] - drive * x.w[k]);
            d.w[k] = 4.0 * std::imag(std::conj(x.s[k]) * drive) - p.gamma * (x.w[k] + 1.0);
        }
    return d;
}

// ---------------------------------------------------------------------------
// Integration

struct IntegrateOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    std::size_t samples = 1024;  // uniformly spaced output times, at least 512
    std::size_t max_steps = 10'000'000;
};

/// Raised when the adaptive step collapses or the step budget is exhausted.
/// Carries the last accepted state (flattened) and its time.
class IntegrationError : public NumericError {
public:
    IntegrationError(const std::string& what, double t, std::vector<double> state)
        : NumericError(what), time_(t), state_(std::move(state)) {}
    double time() const noexcept { return time_; }
    const std::vector<double>& last_state() const noexcept { return state_; }

private:
    double time_;
    std::vector<double> state_;
};

namespace detail {

using FlatState = std::vector<double>;

/// Adaptive Runge-Kutta-Fehlberg 7(8) sampled on a uniform grid over
/// [0, t_end]; `observe(t, x)` is called at every grid point.
template <typename Rhs, typename Observer>
void integrate_uniform(Rhs&& rhs, FlatState x, double t_end, const IntegrateOptions& opt,
                       Observer&& observe) {
    namespace ode = boost::numeric::odeint;
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be > 0");
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be > 0");

    auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_fehlberg78<FlatState>());
    auto system = [&rhs](const FlatState& in, FlatState& out, double) { rhs(in, out); };

    const std::size_t n = std::max<std::size_t>(opt.samples, 512);
    double t = 0.0;
    double dt = std::min(1e-3, t_end / double(n));
    std::size_t steps = 0;
    observe(0.0, x);
    for (std::size_t k = 1; k < n; ++k) {
        const double target = (k + 1 == n) ? t_end : t_end * double(k) / double(n - 1);
        while (t < target) {
            if (dt < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationError("stiff or singular trajectory: step size underflow", t, x);
            const double h = std::min(dt, target - t);
            double h_try = h;
            if (stepper.try_step(system, x, t, h_try) == ode::success) {
                if (++steps > opt.max_steps)
                    throw IntegrationError("stiff or singular trajectory: step budget exhausted", t, x);
                // A step shortened to hit the grid point should not shrink the
                // step used afterwards.
                dt = (h < dt) ? std::max(dt, h_try) : h_try;
            } else {
                dt = h_try;
            }
            for (double v : x)
                if (!std::isfinite(v)) throw IntegrationError("non-finite state during integration", t, x);
        }
        observe(target, x);
    }
}

}  // namespace detail

struct Trajectory {
    std::vector<double> times;
    std::vector<MFState> states;
    /// max |S^2(t) - S^2(0)| over the samples; present only when gamma = 0.
    std::optional<double> conservation_drift;
};

struct Trajectory2D {
    std::vector<double> times;
    std::vector<State2D> states;
    /// max over samples and sites of |w^2 + 4|s|^2 - (same at t=0)|; gamma = 0 only.
    std::optional<double> conservation_drift;
};

inline Trajectory integrate(const MFState& x0, const EffectiveParams& p, double t_end,
                            const IntegrateOptions& opt = {}) {
    p.validate();
    Trajectory traj;
    const auto a = x0.to_array();
    detail::integrate_uniform(
        [&p](const detail::FlatState& in, detail::FlatState& out) {
            const auto d = rhs_1d(MFState::from_range(in), p).to_array();
            std::copy(d.begin(), d.end(), out.begin());
        },
        detail::FlatState(a.begin(), a.end()), t_end, opt,
        [&traj](double t, const detail::FlatState& x) {
            traj.times.push_back(t);
            traj.states.push_back(MFState::from_range(x));
        });
    if (p.gamma == 0.0) {
        const double s0 = spin_norm(traj.states.front());
        double drift = 0.0;
        for (const auto& x : traj.states) drift = std::max(drift, std::abs(spin_norm(x) - s0));
        traj.conservation_drift = drift;
    }
    return traj;
}

inline Trajectory2D integrate(const State2D& x0, const Params2D& p, double t_end,
                              const IntegrateOptions& opt = {}) {
    p.validate();
    if (!x0.consistent_with(p)) throw std::invalid_argument("integrate: state shape does not match Params2D");
    Trajectory2D traj;
    State2D scratch = x0;
    detail::integrate_uniform(
        [&p, &scratch](const detail::FlatState& in, detail::FlatState& out) {
            scratch.unflatten(in);
            out = rhs_2d(scratch, p).flatten();
        },
        x0.flatten(), t_end, opt,
        [&traj, &x0](double t, const detail::FlatState& x) {
            State2D s = x0;
            s.unflatten(x);
            traj.times.push_back(t);
            traj.states.push_back(std::move(s));
        });
    if (p.gamma == 0.0) {
        const State2D& first = traj.states.front();
        double drift = 0.0;
        for (const auto& x : traj.states)
            for (std::size_t k = 0; k < x.sites(); ++k)
                drift = std::max(drift, std::abs(x.local_norm(k) - first.local_norm(k)));
        traj.conservation_drift = drift;
    }
    return traj;
}

/// A trajectory has settled when the right-hand side at the last sample is
/// below 1e-8 and every component moved less than 1e-7 over the final 10%
/// of samples. Anything else is a limit-cycle candidate.
inline bool is_settled(const Trajectory& traj, const EffectiveParams& p) {
    if (traj.states.empty()) return false;
    if (residual_1d(traj.states.back(), p) >= 1e-8) return false;
    const std::size_t n = traj.states.size();
    const std::size_t tail = std::max<std::size_t>(2, n / 10);
    const auto last = traj.states.back().to_array();
    for (std::size_t k = n - tail; k < n; ++k) {
        const auto a = traj.states[k].to_array();
        for (std::size_t c = 0; c < 5; ++c)
            if (std::abs(a[c] - last[c]) >= 1e-7) return false;
    }
    return true;
}

}  // namespace cavity_mf

#endif
