#ifndef CAVITY_MF_TESTS_ORACLES_HPP
#define CAVITY_MF_TESTS_ORACLES_HPP

// Reference implementations written independently of the library: the
// single-cavity equations in complex form, random parameter draws and the
// standard parameter sets used across the suite.

#include <cmath>
#include <complex>
#include <random>

#include <cavity_mf/dynamics.hpp>
#include <cavity_mf/model.hpp>

namespace oracle {

using cplx = std::complex<double>;
using cavity_mf::EffectiveParams;
using cavity_mf::MFState;

/// alpha' = -i[(D_ph + l w - i k) alpha + g s + eta]
/// s'     = i g w alpha - i (D_at + 2 l |alpha|^2) s - gamma/2 s
/// w'     = 4 g Im(conj(s) alpha) - gamma (w + N)
/// with s = (s_x - i s_y)/2, converted back to the five real variables.
inline MFState rhs(const MFState& x, const EffectiveParams& p) {
    const cplx I{0.0, 1.0};
    const cplx alpha{x.alpha_r, x.alpha_i};
    const cplx s = 0.5 * cplx{x.s_x, -x.s_y};
    const double w = x.w;
    const cplx da = -I * ((p.delta_ph + p.lambda * w - I * p.kappa) * alpha + p.g_tilde * s + cplx{p.eta_r, p.eta_i});
    const cplx ds = I * p.g_tilde * w * alpha - I * (p.delta_at + 2.0 * p.lambda * std::norm(alpha)) * s -
                    0.5 * p.gamma * s;
    const double dw = 4.0 * p.g_tilde * std::imag(std::conj(s) * alpha) - p.gamma * (w + p.n_spins);
    return {da.real(), da.imag(), 2.0 * ds.real(), -2.0 * ds.imag(), dw};
}

/// Delta_ph = kappa = 0.5, eta = 1, N = 1, lambda = Delta_at = gamma = 0.
inline EffectiveParams fig3(double g_tilde = 1.0) {
    EffectiveParams p;
    p.delta_ph = 0.5;
    p.kappa = 0.5;
    p.eta_r = 1.0;
    p.n_spins = 1.0;
    p.g_tilde = g_tilde;
    return p;
}

inline EffectiveParams random_params(std::mt19937_64& rng, bool with_gamma = false) {
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.05, 2.0), n(0.5, 3.0);
    EffectiveParams p;
    p.delta_at = u(rng);
    p.delta_ph = u(rng);
    p.lambda = u(rng);
    p.g_tilde = u(rng);
    p.kappa = pos(rng);
    p.gamma = with_gamma ? pos(rng) : 0.0;
    p.eta_r = u(rng);
    p.eta_i = u(rng);
    p.n_spins = n(rng);
    return p;
}

/// Random state with the spin on the sphere of radius N.
inline MFState random_state(std::mt19937_64& rng, double n_spins, double field = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> g;
    double v[3] = {g(rng), g(rng), g(rng)};
    const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {field * u(rng), field * u(rng), n_spins * v[0] / r, n_spins * v[1] / r, n_spins * v[2] / r};
}

}  // namespace oracle

#endif
