#ifndef CAVITY_MF_MODEL_HPP
#define CAVITY_MF_MODEL_HPP

// Parameter types for the driven-dissipative nonlinear Jaynes-Cummings model
// and the mapping from the bare three-level (Lambda) atom to the effective
// two-level description obtained by eliminating the excited state |e>.
//
// All frequencies are dimensionless. A run picks a reference rate (usually the
// pump amplitude) and every number is expressed in that unit; nothing in this
// library rescales implicitly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "errors.hpp"

namespace cavity_mf {

/// Bare Hamiltonian frequencies before adiabatic elimination.
///
/// `omega_aux` is the rotating-frame frequency. With a coherent cavity pump it
/// must equal the pump frequency for the Hamiltonian to be time independent;
/// it is kept only for provenance and never enters the effective constants.
/// The scalar offset F of the effective Hamiltonian commutes with the
/// mean-field dynamics and is intentionally not represented.
struct PhysicalParams {
    double g = 0.0;             // cavity coupling of the |g>-|e> transition
    double omega_rabi = 0.0;    // classical Rabi frequency on |s>-|e>
    double delta_e = 0.0;       // excited-state detuning
    double delta_s = 0.0;       // |s> detuning
    double delta_cavity = 0.0;  // cavity detuning omega - omega_aux
    double omega_aux = 0.0;
};

/// Constants of the effective single-cavity model
///   H = (Delta_at/2 + lambda a^dag a) S^z + Delta_ph a^dag a + g~ (S^+ a + h.c.)
/// plus cavity loss kappa, spin decay gamma and coherent pump eta.
struct EffectiveParams {
    double delta_at = 0.0;
    double delta_ph = 0.0;
    double lambda = 0.0;
    double g_tilde = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    double eta_r = 0.0;
    double eta_i = 0.0;
    double n_spins = 1.0;  // collective spin length N (real, not integer)

    std::complex<double> eta() const noexcept { return {eta_r, eta_i}; }
    double eta2() const noexcept { return eta_r * eta_r + eta_i * eta_i; }
    double eta_abs() const noexcept { return std::hypot(eta_r, eta_i); }

    /// Largest frequency in the problem, used to scale absolute tolerances.
    double frequency_scale() const noexcept {
        double s = 1.0;
        for (double v : {delta_at, delta_ph, lambda * n_spins, g_tilde * n_spins, kappa, gamma,
                         eta_abs()})
            s = std::max(s, std::abs(v));
        return s;
    }

    bool is_finite() const noexcept {
        for (double v : {delta_at, delta_ph, lambda, g_tilde, kappa, gamma, eta_r, eta_i, n_spins})
            if (!std::isfinite(v)) return false;
        return true;
    }

    void validate() const {
        if (!is_finite()) throw DomainError("effective parameters must be finite");
        if (kappa < 0.0) throw DomainError("kappa must be >= 0");
        if (gamma < 0.0) throw DomainError("gamma must be >= 0");
        if (!(n_spins > 0.0)) throw DomainError("n_spins must be > 0");
    }

    EffectiveParams with_g_tilde(double g) const {
        EffectiveParams p = *this;
        p.g_tilde = g;
        return p;
    }
};

/// Adiabatic elimination of |e>:
///   Delta_at = Delta_s - Omega^2/Delta_e
///   Delta_ph = Delta_cavity - g^2/(2 Delta_e)
///   lambda   = -g^2/(2 Delta_e)
///   g~       = -g Omega/Delta_e
inline EffectiveParams derive_effective_params(const PhysicalParams& phys, double kappa,
                                               double gamma, std::complex<double> eta,
                                               double n_spins) {
    if (phys.delta_e == 0.0) throw DomainError("adiabatic elimination singular: delta_e = 0");

    EffectiveParams p;
    const double shift = -phys.g * phys.g / (2.0 * phys.delta_e);
    p.delta_at = phys.delta_s - phys.omega_rabi * phys.omega_rabi / phys.delta_e;
    p.delta_ph = phys.delta_cavity + shift;
    p.lambda = shift;
    p.g_tilde = -phys.g * phys.omega_rabi / phys.delta_e;
    p.kappa = kappa;
    p.gamma = gamma;
    p.eta_r = eta.real();
    p.eta_i = eta.imag();
    p.n_spins = n_spins;
    p.validate();
    return p;
}

/// Two-dimensional array: N_R row modes a_i and N_C column modes b_nu with one
/// spin at every crossing. Couplings and photon detunings may differ between
/// rows ("a") and columns ("b"); everything else is uniform. Spins use the
/// per-spin normalization w^2 + 4|s|^2 = 1.
struct Params2D {
    double g_tilde_a = 0.0;
    double g_tilde_b = 0.0;
    double delta_ph_a = 0.0;
    double delta_ph_b = 0.0;
    double delta_at = 0.0;
    double lambda = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    std::complex<double> eta{0.0, 0.0};
    int n_rows = 1;
    int n_cols = 1;

    void validate() const {
        if (n_rows < 1 || n_cols < 1) throw DomainError("Params2D needs n_rows >= 1 and n_cols >= 1");
        if (kappa < 0.0) throw DomainError("kappa must be >= 0");
        if (gamma < 0.0) throw DomainError("gamma must be >= 0");
        for (double v : {g_tilde_a, g_tilde_b, delta_ph_a, delta_ph_b, delta_at, lambda, kappa, gamma,
                         eta.real(), eta.imag()})
            if (!std::isfinite(v)) throw DomainError("Params2D must be finite");
    }
};

}  // namespace cavity_mf

#endif
