#ifndef CAVITY_MF_POLYNOMIAL_HPP
#define CAVITY_MF_POLYNOMIAL_HPP

// All-roots solver for real polynomials of modest degree (the steady-state
// branches need degree <= 6). Roots are eigenvalues of the companion matrix,
// polished by a few complex Newton steps on the original coefficients.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cavity_mf {

/// Coefficients are stored highest degree first: c[0] x^n + ... + c[n].
using Coefficients = std::vector<double>;

template <typename T>
T polyval(std::span<const double> c, T x) {
    T acc{0};
    for (double ci : c) acc = acc * x + ci;
    return acc;
}

inline std::complex<double> polyder_val(std::span<const double> c, std::complex<double> x) {
    const std::size_t n = c.size();
    std::complex<double> acc{0.0};
    for (std::size_t i = 0; i + 1 < n; ++i)
        acc = acc * x + c[i] * static_cast<double>(n - 1 - i);
    return acc;
}

/// Product of two polynomials.
inline Coefficients polymul(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    Coefficients out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

/// max_k |c_k| |x|^k, the scale against which |P(x)| is judged.
inline double backward_error_scale(std::span<const double> c, double x) {
    const std::size_t n = c.size();
    double scale = 0.0, xp = 1.0, ax = std::abs(x);
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(c[n - 1 - i]) * xp);
        xp *= ax;
    }
    return scale;
}

/// Every complex root, with multiplicity. Leading zeros are stripped (the
/// degree drops accordingly); trailing zeros become exact roots at 0.
/// An identically zero polynomial has no well-defined root set and yields {}.
inline std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
    std::size_t first = 0;
    while (first < coeffs.size() && coeffs[first] == 0.0) ++first;
    if (first == coeffs.size()) return {};
    std::size_t last = coeffs.size();
    std::size_t zero_roots = 0;
    while (last - first > 1 && coeffs[last - 1] == 0.0) {
        --last;
        ++zero_roots;
    }
    const std::span<const double> c = coeffs.subspan(first, last - first);
    const int degree = static_cast<int>(c.size()) - 1;

    std::vector<std::complex<double>> roots(zero_roots, {0.0, 0.0});
    if (degree == 0) return roots;
    if (degree == 1) {
        roots.emplace_back(-c[1] / c[0], 0.0);
        return roots;
    }

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int j = 0; j < degree; ++j) companion(0, j) = -c[j + 1] / c[0];
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;

    // Diagonal balancing keeps the eigen-solve accurate when coefficients
    // span many orders of magnitude.
    Eigen::VectorXd d = Eigen::VectorXd::Ones(degree);
    for (int sweep = 0; sweep < 20; ++sweep) {
        bool changed = false;
        for (int i = 0; i < degree; ++i) {
            double row = 0.0, col = 0.0;
            for (int k = 0; k < degree; ++k) {
                if (k == i) continue;
                row += std::abs(companion(i, k));
                col += std::abs(companion(k, i));
            }
            if (row == 0.0 || col == 0.0) continue;
            double f = 1.0;
            while (col < row / 2.0) { col *= 2.0; row /= 2.0; f *= 2.0; }
            while (col > row * 2.0) { col /= 2.0; row *= 2.0; f /= 2.0; }
            if (f != 1.0) {
                changed = true;
                d(i) *= f;
                companion.row(i) /= f;
                companion.col(i) *= f;
            }
        }
        if (!changed) break;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    for (int i = 0; i < degree; ++i) {
        std::complex<double> z = ev(i);
        for (int it = 0; it < 4; ++it) {
            const std::complex<double> dp = polyder_val(c, z);
            if (dp == 0.0) break;
            const std::complex<double> step = polyval(c, z) / dp;
            const std::complex<double> next = z - step;
            if (!(std::abs(polyval(c, next)) < std::abs(polyval(c, z)))) break;
            z = next;
        }
        roots.push_back(z);
    }
    return roots;
}

/// Real roots accepted by the two tests used throughout the steady-state
/// solvers: |Im| <= 1e-8 (1 + |Re|) and |P(Re)| <= 1e-10 * scale(Re).
inline std::vector<double> real_roots(std::span<const double> coeffs) {
    std::vector<double> out;
    for (const auto& z : polynomial_roots(coeffs)) {
        if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z.real()))) continue;
        const double x = z.real();
        if (std::abs(polyval(coeffs, x)) > 1e-10 * backward_error_scale(coeffs, x)) continue;
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cavity_mf

#endif
