#include <gtest/gtest.h>

#include <cmath>

#include <cavity_mf/regions.hpp>

#include "oracles.hpp"

using namespace cavity_mf;

TEST(ExistenceEdges, FindsStepFunctionEdges) {
    const auto e = existence_edges([](double x) { return x > 0.3 && x < 0.7; }, 0.0, 1.0, 11);
    ASSERT_EQ(e.size(), 2u);
    EXPECT_TRUE(e[0].rising);
    EXPECT_NEAR(e[0].g_tilde, 0.3, 1e-12);
    EXPECT_FALSE(e[1].rising);
    EXPECT_NEAR(e[1].g_tilde, 0.7, 1e-12);
}

TEST(RegionReport, LinearCaseMatchesClosedForm) {
    const auto r = region_report(oracle::fig3(), 0.05, 4.0, 400);
    ASSERT_TRUE(r.g1_star && r.g2_star);
    EXPECT_NEAR(*r.g1_star, 2.0, 1e-10);
    EXPECT_NEAR(*r.g2_star, 2.0 * std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(*r.g2_star / *r.g1_star, std::sqrt(1.0 + 1.0), 1e-10);
    EXPECT_TRUE(r.flags.empty());
}

TEST(RegionReport, RatioFollowsDetuning) {
    for (double dph : {0.0, 0.2, 1.5}) {
        auto p = oracle::fig3();
        p.delta_ph = dph;
        const auto r = region_report(p, 0.05, 8.0, 800);
        ASSERT_TRUE(r.g1_star && r.g2_star) << dph;
        EXPECT_NEAR(*r.g2_star / *r.g1_star, std::sqrt(1.0 + std::pow(dph / p.kappa, 2)), 1e-9);
    }
}

TEST(RegionReport, FlagsBoundaryOutsideRange) {
    const auto r = region_report(oracle::fig3(), 0.05, 2.5, 100);
    EXPECT_TRUE(r.g1_star.has_value());
    EXPECT_FALSE(r.g2_star.has_value());
    ASSERT_FALSE(r.flags.empty());
    EXPECT_EQ(r.flags.front(), "g2_star above swept range");
    const auto low = region_report(oracle::fig3(), 2.2, 4.0, 100);
    EXPECT_FALSE(low.g1_star.has_value());
}

TEST(RegionBoundaries, RegionTwoShrinksWithLambda) {
    const std::vector<double> lambdas{0.1, 0.3, 1.0, 3.0, 10.0, 100.0};
    const auto rows = region_boundaries_lambda(oracle::fig3(), lambdas, 0.05, 4.0, 400);
    ASSERT_EQ(rows.size(), lambdas.size());
    EXPECT_GT(rows.front().region_II_width, 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        ASSERT_TRUE(rows[k].g1_star && rows[k].g2_star) << lambdas[k];
        EXPECT_NEAR(*rows[k].g1_star, 2.0, 1e-10);
        if (k > 0) EXPECT_LE(rows[k].region_II_width, rows[k - 1].region_II_width + 1e-4);
    }
    EXPECT_LT(rows.back().region_II_width, 0.02 * 2.0);
}

TEST(RegionBoundaries, RegionRClosesWithDetuning) {
    const std::vector<double> das{0.5, 1.0, 2.0, 3.0, 3.9};
    const auto rows = region_boundaries_delta_at(oracle::fig3(), das, 0.05, 6.0, 3000);
    ASSERT_TRUE(rows[0].region_R_interval.has_value());
    EXPECT_GT(rows[0].region_R_width(), 0.0);
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LE(rows[k].region_R_width(), rows[k - 1].region_R_width());
    EXPECT_FALSE(rows.back().region_R_interval.has_value());
    for (const auto& r : rows) {
        EXPECT_FALSE(r.g1_star.has_value());
        EXPECT_TRUE(r.flags.empty());
    }
}

TEST(RegionBoundaries, InsideRegionRFourRoots) {
    auto p = oracle::fig3();
    p.delta_at = 0.5;
    const auto r = region_report(p, 0.05, 6.0, 1000);
    ASSERT_TRUE(r.region_R_interval.has_value());
    const auto [a, b] = *r.region_R_interval;
    const auto roots = quartic_w_branch(p.with_g_tilde(0.5 * (a + b)));
    EXPECT_EQ(roots.size(), 4u);
    for (const auto& x : roots) EXPECT_LE(std::abs(x.state.w), p.n_spins);
}

TEST(RegionReport, NeedsRange) { EXPECT_THROW(region_report(oracle::fig3(), 1.0, 1.0, 10), DomainError); }
