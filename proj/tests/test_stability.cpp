#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <cavity_mf/stability.hpp>

#include "oracles.hpp"

using namespace cavity_mf;

namespace {

// Central-difference Jacobian of the independent right-hand side.
Matrix5 fd_jacobian(const MFState& x, const EffectiveParams& p, double h) {
    Matrix5 m;
    for (int j = 0; j < 5; ++j) {
        Vector5 e = Vector5::Zero();
        e(j) = h;
        const Vector5 plus = to_vector(oracle::rhs(to_state(to_vector(x) + e), p));
        const Vector5 minus = to_vector(oracle::rhs(to_state(to_vector(x) - e), p));
        m.col(j) = (plus - minus) / (2.0 * h);
    }
    return m;
}

EffectiveParams point_a() {
    auto p = oracle::fig3(1.5);
    p.lambda = 1.3;
    return p;
}

const SteadyBranch* find_label(const std::vector<SteadyBranch>& v, BranchLabel label) {
    for (const auto& b : v)
        if (b.branch == label) return &b;
    return nullptr;
}

}  // namespace

TEST(Jacobian, NoNonlinearityRows) {
    const auto p = oracle::fig3(1.7);
    const MFState x{0.0, 0.0, 0.3, -0.4, 0.5};
    const Matrix5 m = jacobian(x, p);
    EXPECT_EQ(m(0, 3), -0.5 * p.g_tilde);
    EXPECT_EQ(m(1, 2), -0.5 * p.g_tilde);
    EXPECT_EQ(m(0, 4), 0.0);
    EXPECT_EQ(m(1, 4), 0.0);
    EXPECT_EQ(m(0, 1), p.delta_ph);
    EXPECT_EQ(m(1, 0), -p.delta_ph);
}

TEST(Jacobian, TraceIsTwiceTheCavityLoss) {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 100; ++k) {
        const auto p = oracle::random_params(rng);
        const auto x = oracle::random_state(rng, p.n_spins, 2.0);
        EXPECT_NEAR(jacobian(x, p).trace(), -2.0 * p.kappa, 1e-14);
    }
}

TEST(Jacobian, MatchesFiniteDifferences) {
    std::mt19937_64 rng(22);
    for (int k = 0; k < 1000; ++k) {
        const auto p = oracle::random_params(rng, k % 3 == 0);
        const auto x = oracle::random_state(rng, p.n_spins, 2.0);
        const Matrix5 a = jacobian(x, p);
        const Matrix5 f = fd_jacobian(x, p, 1e-6);
        ASSERT_LE((a - f).cwiseAbs().maxCoeff(), 1e-5 * std::max(1.0, a.cwiseAbs().maxCoeff()));
    }
}

TEST(Jacobian, ConservedSpinIsLeftNullVector) {
    std::mt19937_64 rng(23);
    int count = 0;
    for (int k = 0; k < 100 && count < 100; ++k) {
        auto p = oracle::random_params(rng);
        p.delta_at = (k % 2 == 0) ? 0.0 : p.delta_at;
        p.lambda = (k % 4 < 2) ? 0.0 : p.lambda;
        for (const auto& b : all_branches(p)) {
            const Matrix5 m = jacobian(b.state, p);
            const Spectrum s = spectrum(b.state, p);
            ASSERT_TRUE(s.ok);
            const double r = s.spectral_radius();
            EXPECT_LT(std::abs(s.eigenvalues[s.zero_mode_index]), 1e-8 * r);
            EXPECT_LT(std::abs(m.determinant()), 1e-10 * std::pow(r, 5));
            ++count;
        }
    }
    EXPECT_GE(count, 100);
}

TEST(Classify, DarkStateStable) {
    EffectiveParams p;
    p.kappa = 0.5;
    p.g_tilde = 0.8;
    p.n_spins = 1.0;
    EXPECT_EQ(classify(make_branch({0, 0, 0, 0, -1.0}, {}, p), p), Stability::Stable);
}

TEST(Classify, InvertedDarkStateUnstable) {
    EffectiveParams p;
    p.kappa = 0.5;
    p.g_tilde = 0.8;
    p.n_spins = 1.0;
    EXPECT_EQ(classify(make_branch({0, 0, 0, 0, 1.0}, {}, p), p), Stability::Unstable);
}

TEST(Classify, RegionThreeOnlyLowerAlphaZeroStable) {
    const auto p = oracle::fig3(3.5);
    auto b = all_branches(p);
    classify_all(b, p);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(find_label(b, {BranchKind::TrivialAlphaZero, 0})->stability, Stability::Unstable);
    EXPECT_EQ(find_label(b, {BranchKind::TrivialAlphaZero, 1})->stability, Stability::Stable);
}

TEST(Classify, RegionTwoAlphaZeroPairSplits) {
    const auto p = oracle::fig3(2.5);
    auto b = all_branches(p);
    classify_all(b, p);
    EXPECT_EQ(find_label(b, {BranchKind::TrivialAlphaZero, 0})->stability, Stability::Unstable);
    EXPECT_EQ(find_label(b, {BranchKind::TrivialAlphaZero, 1})->stability, Stability::Stable);
}

TEST(Classify, DecayRemovesZeroModeExclusion) {
    auto p = oracle::fig3(1.2);
    p.gamma = 0.3;
    for (const auto& b : all_branches(p)) {
        const Spectrum s = spectrum(b.state, p);
        EXPECT_GT(std::abs(s.eigenvalues[s.zero_mode_index]), 1e-6);
        EXPECT_NE(classify(s, p), Stability::Unknown);
    }
}

TEST(Classify, NonFiniteStateIsUnknown) {
    const auto p = oracle::fig3(1.0);
    EXPECT_EQ(classify(spectrum({NAN, 0, 0, 0, 1}, p), p), Stability::Unknown);
}

TEST(Classify, AgreesWithTimeIntegration) {
    // Stable: every perturbation decays back. Unstable: some perturbation
    // leaves by more than 1e-2.
    std::mt19937_64 rng(24);
    std::normal_distribution<double> n;
    for (double g : {1.0, 2.5, 3.5}) {
        const auto p = oracle::fig3(g);
        auto branches = all_branches(p);
        classify_all(branches, p);
        for (const auto& b : branches) {
            const Spectrum s = spectrum(b.state, p);
            double slowest = 1e300;
            const int skip = s.zero_mode_index;
            for (int k = 0; k < 5; ++k)
                if (k != skip) slowest = std::min(slowest, std::abs(s.eigenvalues[k].real()));
            const double t_end = std::max(200.0 / p.kappa, 30.0 / std::max(slowest, 1e-3));
            bool departed = false;
            for (int trial = 0; trial < 4; ++trial) {
                MFState x0 = b.state + 1e-4 * MFState{n(rng), n(rng), n(rng), n(rng), n(rng)};
                // Stay on the sphere so the comparison is against the same fixed point.
                const double scale = p.n_spins / std::sqrt(spin_norm(x0));
                x0.s_x *= scale;
                x0.s_y *= scale;
                x0.w *= scale;
                const auto traj = integrate(x0, p, t_end);
                double far = 0.0;
                for (const auto& x : traj.states) far = std::max(far, max_norm_distance(x, b.state));
                const double end = max_norm_distance(traj.states.back(), b.state);
                if (b.stability == Stability::Stable) EXPECT_LT(end, 1e-6) << "g = " << g << " " << to_string(b.branch);
                if (far > 1e-2) departed = true;
            }
            if (b.stability == Stability::Unstable) EXPECT_TRUE(departed) << "g = " << g << " " << to_string(b.branch);
        }
    }
}

TEST(HopfScan, NonlinearCaseHasComplexCrossing) {
    auto p = oracle::fig3();
    p.lambda = 1.3;
    const auto hopf = hopf_scan(p, 0.2, 3.0, 57);
    ASSERT_FALSE(hopf.empty());
    bool bounds_window = false;
    for (const auto& h : hopf) {
        EXPECT_LT(std::abs(h.re_pair), 1e-6);
        EXPECT_GT(h.im_pair, 1e-6);
        if (h.g_tilde < 1.5) bounds_window = true;
    }
    EXPECT_TRUE(bounds_window);
}

TEST(HopfScan, NoneWithoutNonlinearity) { EXPECT_TRUE(hopf_scan(oracle::fig3(), 0.05, 4.0, 80).empty()); }

TEST(HopfScan, EmptyRange) { EXPECT_TRUE(hopf_scan(oracle::fig3(), 1.0, 1.0, 10).empty()); }

TEST(HopfScan, NeedsThreeSteps) { EXPECT_THROW(hopf_scan(oracle::fig3(), 0.0, 1.0, 2), DomainError); }

TEST(LimitCycle, PointAOscillates) {
    const auto lc = find_limit_cycle(point_a(), {0.0, 0.0, 0.0, 0.0, -1.0}, 400.0, 200.0);
    ASSERT_TRUE(lc.has_value());
    EXPECT_TRUE(lc->converged) << lc->diagnostic;
    EXPECT_GT(lc->period, 0.0);
    EXPECT_GT(lc->w_max - lc->w_min, 1e-3);
    EXPECT_LE(lc->period_spread, 0.01);
    EXPECT_LT(lc->conservation_drift, 1e-8);
    ASSERT_FALSE(lc->orbit.empty());
    for (const auto& x : lc->orbit) EXPECT_NEAR(spin_norm(x), 1.0, 1e-8);
}

TEST(LimitCycle, RegionThreeSettles) {
    const auto p = oracle::fig3(3.5);
    const auto stable = trivial_branch(p)[1].state;
    const auto lc = find_limit_cycle(p, stable + MFState{1e-3, 0, 0, 0, 0}, 200.0, 100.0);
    EXPECT_FALSE(lc.has_value());
}

TEST(LimitCycle, NeedsMeasurementWindow) {
    EXPECT_THROW(find_limit_cycle(point_a(), {0, 0, 0, 0, -1}, 1.0, 0.0), DomainError);
}
