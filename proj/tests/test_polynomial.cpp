#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <random>

#include <cavity_mf/polynomial.hpp>

using namespace cavity_mf;

namespace {

// Expands prod (x - r_k) with highest degree first.
Coefficients from_roots(const std::vector<double>& roots, double lead = 1.0) {
    Coefficients c{lead};
    for (double r : roots) c = polymul(c, Coefficients{1.0, -r});
    return c;
}

}  // namespace

TEST(Polynomial, EvaluatesHornerForm) {
    const Coefficients c{2.0, -3.0, 0.0, 5.0};
    EXPECT_DOUBLE_EQ(polyval(std::span<const double>(c), 2.0), 2 * 8 - 3 * 4 + 5);
    EXPECT_EQ(polyder_val(c, {2.0, 0.0}), std::complex<double>(6 * 4 - 6 * 2, 0.0));
}

TEST(Polynomial, MultipliesCoefficients) {
    const Coefficients p = polymul(Coefficients{1.0, 1.0}, Coefficients{1.0, -1.0});
    EXPECT_EQ(p, (Coefficients{1.0, 0.0, -1.0}));
}

TEST(Polynomial, RecoversDistinctRealRoots) {
    const std::vector<double> expected{-0.9, -0.1, 0.3, 0.75};
    const auto roots = real_roots(from_roots(expected, 3.0));
    ASSERT_EQ(roots.size(), expected.size());
    for (std::size_t k = 0; k < roots.size(); ++k) EXPECT_NEAR(roots[k], expected[k], 1e-12);
}

TEST(Polynomial, SeparatesComplexPairs) {
    // (x^2 + 1)(x - 2)(x + 0.5)
    const Coefficients c = polymul(Coefficients{1.0, 0.0, 1.0}, from_roots({2.0, -0.5}));
    const auto all = polynomial_roots(c);
    EXPECT_EQ(all.size(), 4u);
    const auto real = real_roots(c);
    ASSERT_EQ(real.size(), 2u);
    EXPECT_NEAR(real[0], -0.5, 1e-13);
    EXPECT_NEAR(real[1], 2.0, 1e-13);
}

TEST(Polynomial, LeadingZerosReduceDegree) {
    const auto roots = real_roots(Coefficients{0.0, 0.0, 1.0, -3.0, 2.0});
    ASSERT_EQ(roots.size(), 2u);
    EXPECT_NEAR(roots[0], 1.0, 1e-14);
    EXPECT_NEAR(roots[1], 2.0, 1e-14);
}

TEST(Polynomial, TrailingZerosAreExactRoots) {
    const auto roots = polynomial_roots(Coefficients{1.0, -1.0, 0.0, 0.0});
    ASSERT_EQ(roots.size(), 3u);
    EXPECT_EQ(std::count(roots.begin(), roots.end(), std::complex<double>(0.0, 0.0)), 2);
}

TEST(Polynomial, DegenerateInputs) {
    EXPECT_TRUE(polynomial_roots(Coefficients{0.0, 0.0}).empty());
    EXPECT_TRUE(polynomial_roots(Coefficients{4.0}).empty());
    const auto lin = polynomial_roots(Coefficients{2.0, 1.0});
    ASSERT_EQ(lin.size(), 1u);
    EXPECT_EQ(lin[0], std::complex<double>(-0.5, 0.0));
}

TEST(Polynomial, WideCoefficientRangeStaysAccurate) {
    const std::vector<double> expected{-1e-3, 2e-2, 0.7, 40.0, 900.0, 1e4};
    const auto roots = real_roots(from_roots(expected, 1e-6));
    ASSERT_EQ(roots.size(), expected.size());
    for (std::size_t k = 0; k < roots.size(); ++k) EXPECT_NEAR(roots[k] / expected[k], 1.0, 1e-8);
}

TEST(Polynomial, RandomSexticsBackwardStable) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        Coefficients c(7);
        for (double& v : c) v = u(rng);
        for (const auto& z : polynomial_roots(c)) {
            double scale = 0.0, az = std::abs(z), zp = 1.0;
            for (std::size_t k = 0; k < c.size(); ++k, zp *= az) scale = std::max(scale, std::abs(c[c.size() - 1 - k]) * zp);
            EXPECT_LE(std::abs(polyval(std::span<const double>(c), z)), 1e-10 * scale);
        }
    }
}
