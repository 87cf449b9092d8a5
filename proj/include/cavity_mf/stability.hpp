#ifndef CAVITY_MF_STABILITY_HPP
#define CAVITY_MF_STABILITY_HPP

// Linear stability of fixed points, Hopf detection along a coupling sweep and
// limit-cycle characterization from long integrations.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dynamics.hpp"
#include "jacobian.hpp"
#include "steady.hpp"

namespace cavity_mf {

struct Spectrum {
    std::array<cplx, 5> eigenvalues{};  // sorted by real part, largest first
    int zero_mode_index = -1;           // smallest |y|; -1 when the solve failed
    bool ok = false;
    std::string diagnostic;

    double spectral_radius() const {
        double r = 0.0;
        for (const auto& y : eigenvalues) r = std::max(r, std::abs(y));
        return r;
    }
};

inline Spectrum spectrum(const MFState& x, const EffectiveParams& p) {
    Spectrum s;
    const Matrix5 m = jacobian(x, p);
    if (!m.allFinite()) {
        s.diagnostic = "non-finite Jacobian";
        return s;
    }
    Eigen::EigenSolver<Matrix5> solver(m, false);
    if (solver.info() != Eigen::Success) {
        s.diagnostic = "eigenvalue iteration did not converge";
        return s;
    }
    for (int k = 0; k < 5; ++k) s.eigenvalues[k] = solver.eigenvalues()(k);
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](const cplx& a, const cplx& b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    s.zero_mode_index = 0;
    for (int k = 1; k < 5; ++k)
        if (std::abs(s.eigenvalues[k]) < std::abs(s.eigenvalues[s.zero_mode_index])) s.zero_mode_index = k;
    s.ok = true;
    return s;
}

namespace detail {

// Index excluded from classification: the conserved-spin zero mode, which
// only exists without spin decay.
inline int excluded_mode(const Spectrum& s, const EffectiveParams& p) {
    if (p.gamma != 0.0 || !s.ok) return -1;
    const double r = s.spectral_radius();
    return std::abs(s.eigenvalues[s.zero_mode_index]) <= 1e-8 * std::max(r, 1e-300) ? s.zero_mode_index : -1;
}

}  // namespace detail

/// Stable if every eigenvalue (zero mode excluded) has Re < -1e-8, Unstable
/// if any has Re > 1e-8, Marginal otherwise.
inline Stability classify(const Spectrum& s, const EffectiveParams& p) {
    if (!s.ok) return Stability::Unknown;
    const int skip = detail::excluded_mode(s, p);
    bool marginal = false;
    for (int k = 0; k < 5; ++k) {
        if (k == skip) continue;
        const double re = s.eigenvalues[k].real();
        if (re > 1e-8) return Stability::Unstable;
        if (re >= -1e-8) marginal = true;
    }
    return marginal ? Stability::Marginal : Stability::Stable;
}

inline Stability classify(const SteadyBranch& b, const EffectiveParams& p) {
    return classify(spectrum(b.state, p), p);
}

inline void classify_all(std::vector<SteadyBranch>& branches, const EffectiveParams& p) {
    for (auto& b : branches) b.stability = classify(b, p);
}

/// The complex pair (|Im| > 1e-6) with the largest real part, zero mode
/// excluded. Returned with Im > 0.
inline std::optional<cplx> leading_complex_pair(const Spectrum& s, const EffectiveParams& p) {
    if (!s.ok) return std::nullopt;
    const int skip = detail::excluded_mode(s, p);
    std::optional<cplx> best;
    for (int k = 0; k < 5; ++k) {
        if (k == skip || std::abs(s.eigenvalues[k].imag()) <= 1e-6) continue;
        if (!best || s.eigenvalues[k].real() > best->real())
            best = cplx(s.eigenvalues[k].real(), std::abs(s.eigenvalues[k].imag()));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Hopf scan

struct HopfPoint {
    double g_tilde = 0.0;
    double im_pair = 0.0;
    double re_pair = 0.0;
    std::string branch;
    int track = 0;
};

/// Follows every tracked branch of a sweep and bisects each sign change of
/// the real part of its leading complex pair. Crossings whose pair is not
/// genuinely complex, or whose real part does not vanish to 1e-6, are
/// discarded. So are pairs that collapse onto the origin at the crossing
/// (|Im| falling below a tenth of its value at the bracket ends): that is
/// two branches colliding, not a Hopf bifurcation.
inline std::vector<HopfPoint> hopf_scan(const EffectiveParams& p_base, double g_lo, double g_hi, int steps,
                                        unsigned jobs = 1) {
    if (steps < 3) throw DomainError("hopf_scan needs steps >= 3");
    if (!(g_hi > g_lo)) return {};
    const SweepResult sweep = continuation_sweep(p_base, g_lo, g_hi, steps, jobs);

    struct Sample {
        double g;
        MFState x;
        std::optional<cplx> pair;
    };
    auto sample = [&](double g, const MFState& x) {
        const EffectiveParams p = p_base.with_g_tilde(g);
        return Sample{g, x, leading_complex_pair(spectrum(x, p), p)};
    };

    std::vector<HopfPoint> out;
    for (std::size_t i = 0; i + 1 < sweep.points.size(); ++i) {
        for (const auto& a : sweep.points[i].branches) {
            const auto next = std::find_if(sweep.points[i + 1].branches.begin(), sweep.points[i + 1].branches.end(),
                                           [&](const TrackedBranch& t) { return t.track == a.track; });
            if (next == sweep.points[i + 1].branches.end()) continue;
            Sample lo = sample(sweep.points[i].g_tilde, a.branch.state);
            Sample hi = sample(sweep.points[i + 1].g_tilde, next->branch.state);
            if (!lo.pair || !hi.pair || (lo.pair->real() < 0.0) == (hi.pair->real() < 0.0)) continue;
            const double im_bracket = std::min(lo.pair->imag(), hi.pair->imag());

            bool lost = false;
            while (hi.g - lo.g > 1e-10 * std::max(1.0, std::abs(hi.g))) {
                const double g = 0.5 * (lo.g + hi.g);
                const RefineResult r = try_newton_refine(lo.x, p_base.with_g_tilde(g));
                if (!r.converged) {
                    lost = true;
                    break;
                }
                const Sample mid = sample(g, r.state);
                if (!mid.pair) {
                    lost = true;
                    break;
                }
                ((mid.pair->real() < 0.0) == (lo.pair->real() < 0.0) ? lo : hi) = mid;
            }
            if (lost) continue;
            const Sample& best = std::abs(lo.pair->real()) <= std::abs(hi.pair->real()) ? lo : hi;
            if (std::abs(best.pair->real()) >= 1e-6 || best.pair->imag() <= 1e-6) continue;
            if (best.pair->imag() < 0.1 * im_bracket) continue;
            out.push_back({best.g, best.pair->imag(), best.pair->real(), to_string(a.branch.branch), a.track});
        }
    }
    std::sort(out.begin(), out.end(), [](const HopfPoint& a, const HopfPoint& b) { return a.g_tilde < b.g_tilde; });
    return out;
}

// ---------------------------------------------------------------------------
// Limit cycles

struct LimitCycle {
    double period = 0.0;
    double w_min = 0.0;
    double w_max = 0.0;
    std::vector<double> times;  // one period of the orbit, starting at 0
    std::vector<MFState> orbit;
    bool converged = false;
    int peaks_per_period = 0;
    double period_spread = 0.0;     // relative spread of the matched peak spacings
    double amplitude_spread = 0.0;  // spread of matched peak heights over (w_max - w_min)
    double conservation_drift = 0.0;
    std::string diagnostic;
};

struct LimitCycleOptions {
    IntegrateOptions integrate{1e-11, 1e-13, 8192, 10'000'000};
    int max_peaks_per_period = 4;
    int matched_periods = 5;
};

namespace detail {

struct Peak {
    double t;
    double w;
};

// Local maxima of w, refined by a parabola through the three samples.
inline std::vector<Peak> find_peaks(const std::vector<double>& t, const std::vector<MFState>& x) {
    std::vector<Peak> peaks;
    for (std::size_t k = 1; k + 1 < x.size(); ++k) {
        const double a = x[k - 1].w, b = x[k].w, c = x[k + 1].w;
        if (!(b > a && b >= c)) continue;
        const double h = t[k] - t[k - 1];
        const double den = a - 2.0 * b + c;
        const double off = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
        peaks.push_back({t[k] + off * h, b - 0.25 * (a - c) * off});
    }
    return peaks;
}

}  // namespace detail

/// Integrates through `t_transient`, then looks for periodicity in w(t) over
/// `t_measure`. Peaks are grouped k at a time (k = 1 .. max_peaks_per_period)
/// so that orbits with several maxima per period are recognised; the smallest
/// k whose last `matched_periods` spacings agree to 1% and whose peak heights
/// agree to 1% of the oscillation amplitude wins. Returns nullopt when the
/// trajectory settles to a fixed point.
inline std::optional<LimitCycle> find_limit_cycle(const EffectiveParams& p, const MFState& state0,
                                                  double t_transient, double t_measure,
                                                  const LimitCycleOptions& opt = {}) {
    if (!(t_measure > 0.0)) throw DomainError("find_limit_cycle needs t_measure > 0");
    MFState start = state0;
    double drift = 0.0;
    const double s0 = spin_norm(state0);
    if (t_transient > 0.0) {
        IntegrateOptions o = opt.integrate;
        o.samples = 512;
        const Trajectory pre = integrate(state0, p, t_transient, o);
        start = pre.states.back();
        drift = pre.conservation_drift.value_or(0.0);
    }
    const Trajectory traj = integrate(start, p, t_measure, opt.integrate);
    if (is_settled(traj, p)) return std::nullopt;
    for (const auto& x : traj.states) drift = std::max(drift, std::abs(spin_norm(x) - s0));

    LimitCycle lc;
    lc.conservation_drift = p.gamma == 0.0 ? drift : 0.0;
    lc.w_min = lc.w_max = traj.states.front().w;
    for (const auto& x : traj.states) {
        lc.w_min = std::min(lc.w_min, x.w);
        lc.w_max = std::max(lc.w_max, x.w);
    }
    const double amplitude = lc.w_max - lc.w_min;
    if (amplitude <= 1e-6) return std::nullopt;

    const auto peaks = detail::find_peaks(traj.times, traj.states);
    const int m = opt.matched_periods;
    double fallback_spread = -1.0;
    for (int k = 1; k <= opt.max_peaks_per_period; ++k) {
        const int n = static_cast<int>(peaks.size());
        if (n < m + k) break;
        double lo = 1e300, hi = -1e300, sum = 0.0, height = 0.0;
        for (int j = n - m; j < n; ++j) {
            const double spacing = peaks[j].t - peaks[j - k].t;
            lo = std::min(lo, spacing);
            hi = std::max(hi, spacing);
            sum += spacing;
            height = std::max(height, std::abs(peaks[j].w - peaks[j - k].w));
        }
        const double mean = sum / m;
        const double spread = (hi - lo) / mean;
        if (k == 1) fallback_spread = spread;
        if (spread <= 0.01 && height <= 0.01 * amplitude) {
            lc.converged = true;
            lc.period = mean;
            lc.peaks_per_period = k;
            lc.period_spread = spread;
            lc.amplitude_spread = height / amplitude;
            break;
        }
    }

    if (!lc.converged) {
        if (peaks.size() < 2) {
            lc.diagnostic = "fewer than two maxima in the measurement window";
            lc.period = t_measure;
        } else {
            lc.period = (peaks.back().t - peaks.front().t) / double(peaks.size() - 1);
            lc.period_spread = fallback_spread;
            lc.diagnostic = fallback_spread > 0.1 ? "non-periodic signal: peak spacings vary by more than 10%"
                                                  : "periodicity not resolved within the measurement window";
        }
    }

    // Orbit over the last period.
    const double t_end = traj.times.back();
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] < t_end - lc.period) continue;
        lc.times.push_back(traj.times[k] - (t_end - lc.period));
        lc.orbit.push_back(traj.states[k]);
    }
    return lc;
}

}  // namespace cavity_mf

#endif
