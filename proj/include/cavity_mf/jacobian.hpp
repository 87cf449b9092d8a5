#ifndef CAVITY_MF_JACOBIAN_HPP
#define CAVITY_MF_JACOBIAN_HPP

#include <Eigen/Dense>

#include "dynamics.hpp"

namespace cavity_mf {

using Matrix5 = Eigen::Matrix<double, 5, 5>;
using Vector5 = Eigen::Matrix<double, 5, 1>;

inline Vector5 to_vector(const MFState& x) { return {x.alpha_r, x.alpha_i, x.s_x, x.s_y, x.w}; }
inline MFState to_state(const Vector5& v) { return {v(0), v(1), v(2), v(3), v(4)}; }

/// Linearization of rhs_1d about `x`, variables ordered
/// (alpha_r, alpha_i, s_x, s_y, w). For gamma = 0 this is the stability
/// matrix M; spin decay contributes -gamma/2, -gamma/2, -gamma on the last
/// three diagonal entries.
inline Matrix5 jacobian(const MFState& x, const EffectiveParams& p) {
    const double g = p.g_tilde;
    const double lam = p.lambda;
    const double detune = p.delta_ph + lam * x.w;
    const double omega = p.delta_at + 2.0 * lam * x.alpha2();
    const double ar = x.alpha_r, ai = x.alpha_i, sx = x.s_x, sy = x.s_y, w = x.w;

    Matrix5 m;
    // clang-format off
    m << -p.kappa,                detune,                       0.0,     -0.5 * g,  lam * ai,
         -detune,                 -p.kappa,                     -0.5 * g, 0.0,      -lam * ar,
         -4.0 * lam * ar * sy,    -2.0 * g * w - 4.0 * lam * ai * sy, 0.0, -omega,  -2.0 * g * ai,
         -2.0 * g * w + 4.0 * lam * ar * sx, 4.0 * lam * ai * sx,  omega,   0.0,      -2.0 * g * ar,
          2.0 * g * sy,            2.0 * g * sx,                 2.0 * g * ai, 2.0 * g * ar, 0.0;
    // clang-format on
    if (p.gamma != 0.0) {
        m(2, 2) -= 0.5 * p.gamma;
        m(3, 3) -= 0.5 * p.gamma;
        m(4, 4) -= p.gamma;
    }
    return m;
}

}  // namespace cavity_mf

#endif
