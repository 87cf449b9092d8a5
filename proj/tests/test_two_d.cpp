#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <cavity_mf/two_d.hpp>

using namespace cavity_mf;

namespace {

Params2D random_params_2d(std::mt19937_64& rng, bool with_gamma, bool symmetric) {
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.05, 2.0);
    std::uniform_int_distribution<int> side(1, 4);
    Params2D p;
    p.g_tilde_a = u(rng);
    p.g_tilde_b = symmetric ? p.g_tilde_a : u(rng);
    p.delta_ph_a = u(rng);
    p.delta_ph_b = symmetric ? p.delta_ph_a : u(rng);
    p.delta_at = symmetric ? 0.0 : u(rng);
    p.lambda = symmetric ? 0.0 : u(rng);
    p.kappa = pos(rng);
    p.gamma = with_gamma ? pos(rng) : 0.0;
    p.eta = {u(rng), u(rng)};
    p.n_rows = 2 * side(rng);
    p.n_cols = symmetric ? p.n_rows : 2 * side(rng);
    return p;
}

// Checkerboard lattice with one field value per direction.
State2D checkerboard(const ClusterState& c, const Params2D& p) {
    State2D x(p.n_rows, p.n_cols);
    std::fill(x.alpha.begin(), x.alpha.end(), c.alpha);
    std::fill(x.beta.begin(), x.beta.end(), c.beta);
    for (int i = 0; i < p.n_rows; ++i)
        for (int nu = 0; nu < p.n_cols; ++nu) {
            const bool first = (i + nu) % 2 == 0;
            x.s[x.site(i, nu)] = first ? c.s1 : c.s2;
            x.w[x.site(i, nu)] = first ? c.w1 : c.w2;
        }
    return x;
}

}  // namespace

TEST(Homogeneous2D, RecoversSingleCavityThreshold) {
    for (double n : {1.0, 2.0, 5.0}) {
        Params2D p;
        p.g_tilde_a = 0.7;
        p.delta_ph_a = 0.5;
        p.delta_ph_b = 0.3;
        p.kappa = 0.5;
        p.eta = {1.0, 0.4};
        p.n_rows = 1;
        p.n_cols = static_cast<int>(n);
        const auto h = homogeneous_2d(p);
        ASSERT_TRUE(h.g1_star.has_value());
        EXPECT_NEAR(*h.g1_star, 2.0 * std::abs(p.eta) / n, 1e-10);
    }
}

TEST(Homogeneous2D, AsymmetricThresholdSelfConsistent) {
    std::mt19937_64 rng(41);
    int checked = 0;
    for (int k = 0; k < 200; ++k) {
        auto p = random_params_2d(rng, false, false);
        p.delta_at = p.lambda = 0.0;
        const auto g1 = homogeneous_g1_star(p);
        if (!g1) continue;
        EXPECT_NEAR(homogeneous_s2(p, *g1), 0.25, 1e-10);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(Homogeneous2D, SymmetricFieldsAgree) {
    Params2D p;
    p.g_tilde_a = p.g_tilde_b = 0.3;
    p.delta_ph_a = p.delta_ph_b = 0.5;
    p.kappa = 0.5;
    p.eta = {1.0, 0.0};
    p.n_rows = p.n_cols = 3;
    const auto h = homogeneous_2d(p);
    ASSERT_FALSE(h.points.empty());
    for (const auto& f : h.points) {
        EXPECT_LT(std::abs(f.alpha - f.beta), 1e-12);
        EXPECT_LE(f.residual, 1e-9);
        EXPECT_NEAR(f.w * f.w + 4.0 * std::norm(f.s), 1.0, 1e-12);
    }
}

TEST(Homogeneous2D, BranchesSolveArrayEquations) {
    std::mt19937_64 rng(42);
    int found = 0;
    for (int k = 0; k < 200; ++k) {
        auto p = random_params_2d(rng, false, false);
        p.delta_at = p.lambda = 0.0;
        for (const auto& f : homogeneous_2d(p).points) {
            EXPECT_LE(uniform_residual(p, f.alpha, f.beta, f.s, f.w), 1e-9);
            EXPECT_NEAR(f.w * f.w + 4.0 * std::norm(f.s), 1.0, 1e-10);
            ++found;
        }
    }
    EXPECT_GT(found, 100);
}

TEST(Homogeneous2D, DriveZeroPairExistsAboveThreshold) {
    Params2D p;
    p.delta_ph_a = 0.5;
    p.kappa = 0.5;
    p.eta = {1.0, 0.0};
    p.n_rows = 1;
    p.n_cols = 1;
    auto count = [&](double g) {
        p.g_tilde_a = g;
        int c = 0;
        for (const auto& f : homogeneous_2d(p).points) c += f.branch.rfind("drive_zero", 0) == 0;
        return c;
    };
    EXPECT_EQ(count(1.9), 0);
    EXPECT_EQ(count(2.1), 2);
}

TEST(Homogeneous2D, RequiresLinearRegime) {
    Params2D p;
    p.lambda = 0.1;
    EXPECT_THROW(homogeneous_2d(p), DomainError);
    p.lambda = 0.0;
    p.gamma = 0.1;
    EXPECT_THROW(homogeneous_2d(p), DomainError);
}

TEST(Cluster, MatchesArrayOnCheckerboard) {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> n;
    for (int k = 0; k < 100; ++k) {
        const auto p = random_params_2d(rng, k % 2 == 0, false);
        const ClusterState c{{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, n(rng), n(rng)};
        const State2D full = rhs_2d(checkerboard(c, p), p);
        const ClusterState d = rhs_cluster(c, p);
        const double tol = 1e-12 * (1.0 + to_vector(d).cwiseAbs().maxCoeff());
        for (const auto& z : full.alpha) EXPECT_NEAR(std::abs(z - d.alpha), 0.0, tol);
        for (const auto& z : full.beta) EXPECT_NEAR(std::abs(z - d.beta), 0.0, tol);
        for (int i = 0; i < p.n_rows; ++i)
            for (int nu = 0; nu < p.n_cols; ++nu) {
                const bool first = (i + nu) % 2 == 0;
                EXPECT_NEAR(std::abs(full.s[full.site(i, nu)] - (first ? d.s1 : d.s2)), 0.0, tol);
                EXPECT_NEAR(full.w[full.site(i, nu)], first ? d.w1 : d.w2, tol);
            }
    }
}

TEST(Cluster, DarkRootWithoutPump) {
    Params2D p;
    p.g_tilde_a = p.g_tilde_b = 0.8;
    p.delta_ph_a = p.delta_ph_b = 0.3;
    p.kappa = 0.5;
    p.gamma = 0.4;
    p.n_rows = p.n_cols = 4;
    const auto r = cluster_2d(p, 16);
    ASSERT_FALSE(r.roots.empty());
    bool dark = false;
    for (const auto& f : r.roots)
        if (std::abs(f.w1 + 1.0) < 1e-10 && std::abs(f.w2 + 1.0) < 1e-10 && std::abs(f.s1) < 1e-10 &&
            std::abs(f.alpha) < 1e-10 && std::abs(f.beta) < 1e-10)
            dark = true;
    EXPECT_TRUE(dark);
}

TEST(Cluster, RootsAreSublatticeSymmetric) {
    std::mt19937_64 rng(44);
    int roots = 0;
    for (int k = 0; k < 60; ++k) {
        const auto p = random_params_2d(rng, k % 3 != 0, k % 2 == 0);
        const auto r = cluster_2d(p, 16, k);
        EXPECT_EQ(r.seeds_tried, 24);
        for (const auto& f : r.roots) {
            EXPECT_LE(f.residual, 1e-9);
            EXPECT_LT(std::abs(f.w1 - f.w2), 1e-8);
            EXPECT_LT(std::abs(f.s1 - f.s2), 1e-8);
            if (p.g_tilde_a == p.g_tilde_b && p.delta_ph_a == p.delta_ph_b && p.n_rows == p.n_cols)
                EXPECT_LT(std::abs(f.alpha - f.beta), 1e-8);
            ++roots;
        }
    }
    EXPECT_GT(roots, 60);
}

TEST(Cluster, DecayFixesInversion) {
    // With decay the spin equations force (w + 1)/w to one value for both
    // sublattices, so antiferromagnetic seeds cannot survive.
    Params2D p;
    p.g_tilde_a = p.g_tilde_b = 0.6;
    p.delta_ph_a = p.delta_ph_b = 0.5;
    p.kappa = 0.5;
    p.gamma = 0.2;
    p.eta = {1.0, 0.0};
    p.n_rows = p.n_cols = 4;
    const auto r = cluster_2d(p, 0);
    EXPECT_EQ(r.seeds_tried, 8);
    ASSERT_FALSE(r.roots.empty());
    for (const auto& f : r.roots) EXPECT_LT(std::abs(f.w1 - f.w2), 1e-8);
}

TEST(Cluster, DeterministicForSeed) {
    Params2D p;
    p.g_tilde_a = p.g_tilde_b = 0.6;
    p.delta_ph_a = p.delta_ph_b = 0.5;
    p.kappa = 0.5;
    p.eta = {1.0, 0.0};
    p.n_rows = p.n_cols = 2;
    const auto a = cluster_2d(p, 32, 7), b = cluster_2d(p, 32, 7);
    ASSERT_EQ(a.roots.size(), b.roots.size());
    for (std::size_t k = 0; k < a.roots.size(); ++k) EXPECT_EQ(detail::cluster_distance(a.roots[k], b.roots[k]), 0.0);
    EXPECT_EQ(a.non_converged, b.non_converged);
}
