#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include <cavity_mf/model.hpp>

using namespace cavity_mf;

namespace {

EffectiveParams derive(double g, double omega, double delta_e, double delta_s, double delta_cavity) {
    PhysicalParams phys{g, omega, delta_e, delta_s, delta_cavity, 0.0};
    return derive_effective_params(phys, 0.5, 0.0, {1.0, 0.0}, 1.0);
}

}  // namespace

TEST(DeriveEffectiveParams, ZeroCouplingLeavesOnlyDetunings) {
    const auto p = derive(0.0, 1.0, 10.0, 2.0, 1.0);
    EXPECT_DOUBLE_EQ(p.delta_at, 2.0 - 0.1);
    EXPECT_DOUBLE_EQ(p.delta_ph, 1.0);
    EXPECT_EQ(p.lambda, 0.0);
    EXPECT_EQ(p.g_tilde, 0.0);
}

TEST(DeriveEffectiveParams, NoRabiDriveGivesPureShift) {
    const auto p = derive(1.0, 0.0, 2.0, 0.0, 0.0);
    EXPECT_EQ(p.delta_at, 0.0);
    EXPECT_DOUBLE_EQ(p.delta_ph, -0.25);
    EXPECT_DOUBLE_EQ(p.lambda, -0.25);
    EXPECT_EQ(p.g_tilde, 0.0);
}

TEST(DeriveEffectiveParams, HandSubstitution) {
    const auto p = derive(1.0, 1.0, -4.0, -0.25, -0.125);
    EXPECT_DOUBLE_EQ(p.delta_at, 0.0);
    EXPECT_DOUBLE_EQ(p.delta_ph, 0.0);
    EXPECT_DOUBLE_EQ(p.lambda, 0.125);
    EXPECT_DOUBLE_EQ(p.g_tilde, 0.25);
}

TEST(DeriveEffectiveParams, CopiesDecayPumpAndSpinLength) {
    PhysicalParams phys{1.0, 2.0, 3.0, 0.0, 0.0, 7.0};
    const auto p = derive_effective_params(phys, 0.3, 0.2, {1.5, -0.5}, 4.0);
    EXPECT_EQ(p.kappa, 0.3);
    EXPECT_EQ(p.gamma, 0.2);
    EXPECT_EQ(p.eta_r, 1.5);
    EXPECT_EQ(p.eta_i, -0.5);
    EXPECT_EQ(p.n_spins, 4.0);
}

TEST(DeriveEffectiveParams, SingularEliminationThrows) {
    PhysicalParams phys{1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    try {
        derive_effective_params(phys, 0.5, 0.0, {1.0, 0.0}, 1.0);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("adiabatic elimination singular"), std::string::npos);
    }
}

TEST(DeriveEffectiveParams, RejectsInvalidDecayAndSpinLength) {
    PhysicalParams phys{1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
    EXPECT_THROW(derive_effective_params(phys, -0.1, 0.0, {1.0, 0.0}, 1.0), DomainError);
    EXPECT_THROW(derive_effective_params(phys, 0.1, -0.1, {1.0, 0.0}, 1.0), DomainError);
    EXPECT_THROW(derive_effective_params(phys, 0.1, 0.0, {1.0, 0.0}, 0.0), DomainError);
}

TEST(DeriveEffectiveParams, ShiftIdentityAndSignsOnRandomInputs) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 1000; ++k) {
        PhysicalParams phys{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        if (phys.delta_e == 0.0) continue;
        const auto p = derive_effective_params(phys, 1.0, 0.0, {1.0, 0.0}, 1.0);
        EXPECT_EQ(p.delta_ph, phys.delta_cavity + p.lambda);
        EXPECT_NEAR(p.delta_ph - phys.delta_cavity, p.lambda, 4e-16 * (std::abs(p.delta_ph) + std::abs(phys.delta_cavity)));
        const auto sign = [](double v) { return (v > 0) - (v < 0); };
        if (phys.g != 0.0) EXPECT_EQ(sign(p.lambda), -sign(phys.delta_e));
        EXPECT_EQ(sign(p.g_tilde), -sign(phys.g * phys.omega_rabi * phys.delta_e));
    }
}

TEST(DeriveEffectiveParams, IsBitReproducible) {
    PhysicalParams phys{0.37, 1.91, -2.3, 0.7, 0.11, 0.0};
    const auto a = derive_effective_params(phys, 0.5, 0.1, {0.3, 0.4}, 2.0);
    const auto b = derive_effective_params(phys, 0.5, 0.1, {0.3, 0.4}, 2.0);
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
}

TEST(EffectiveParams, PumpAccessorsAgree) {
    EffectiveParams p;
    p.eta_r = 3.0;
    p.eta_i = -4.0;
    EXPECT_EQ(p.eta2(), p.eta_r * p.eta_r + p.eta_i * p.eta_i);
    EXPECT_DOUBLE_EQ(p.eta_abs(), 5.0);
    EXPECT_EQ(p.eta(), std::complex<double>(3.0, -4.0));
}

TEST(Params2DValidate, RejectsEmptyArrays) {
    Params2D p;
    p.n_rows = 0;
    EXPECT_THROW(p.validate(), DomainError);
    p.n_rows = 2;
    p.n_cols = 3;
    EXPECT_NO_THROW(p.validate());
}
