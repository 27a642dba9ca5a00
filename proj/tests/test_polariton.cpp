#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eitmem/polariton.hpp"
#include "oracles.hpp"

using namespace eitmem;
using constants::pi;

namespace {

struct Rb85 : ::testing::Test {
    LevelScheme s = LevelScheme::rb85_d1();
    CouplingTables t = build_coupling_tables(s, {1, 1});
    double T_L = 8e-6;
    MagneticField B(double theta) const { return MagneticField::from_larmor_period(T_L, s.g_g, theta); }
};

LevelScheme scheme(int tfg, int tfgp, int tfe, double g_g, double g_gp) {
    LevelScheme s;
    s.F_g = HalfInt::from_twice(tfg);
    s.F_gp = HalfInt::from_twice(tfgp);
    s.F_e = HalfInt::from_twice(tfe);
    s.g_g = g_g;
    s.g_gp = g_gp;
    return s;
}

}  // namespace

TEST_F(Rb85, BasisIsNormalizedAndSignedAgainstR) {
    const auto b = make_polariton_basis(t, 1e7, 3e8);
    EXPECT_NEAR(b.e_Psi.norm(), 1.0, 1e-15);
    EXPECT_GT(b.e_Psi(0), 0.0);
    for (int i = 0; i < 5; ++i) EXPECT_GT(b.e_Psi(i + 1), 0.0);  // R < 0 here
    EXPECT_THROW(make_polariton_basis(t, 0.0, 0.0), ContractViolation);
}

TEST_F(Rb85, DecompositionOfBasisVectors) {
    const double W = 1e7, Gc = 3e8;
    const auto b = make_polariton_basis(t, W, Gc);
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(5, 7);
    for (int i = 0; i < 5; ++i) S(i, t.dsp_partner(i)) = b.e_Psi(i + 1);
    auto dec = decompose(cplx(b.e_Psi(0)), S, t, b);
    EXPECT_NEAR(dec.p_D, 1.0, 1e-14);
    EXPECT_NEAR(dec.p_B, 0.0, 1e-14);
    EXPECT_NEAR(dec.p_out, 0.0, 1e-14);

    // field-only vector orthogonal to e_Psi inside the subspace
    Eigen::MatrixXcd S2 = Eigen::MatrixXcd::Zero(5, 7);
    S2(0, t.dsp_partner(0)) = 1.0;
    const cplx phi = -b.e_Psi(1) / b.e_Psi(0);
    dec = decompose(phi, S2, t, b);
    EXPECT_NEAR(dec.p_D, 0.0, 1e-14);
    EXPECT_NEAR(dec.p_B, std::norm(phi) + 1.0, 1e-12);

    Eigen::MatrixXcd S3 = Eigen::MatrixXcd::Zero(5, 7);
    S3(2, 0) = cplx(0.3, 0.4);
    dec = decompose(cplx(0.0), S3, t, W, Gc);
    EXPECT_NEAR(dec.p_out, 0.25, 1e-15);
    EXPECT_EQ(dec.p_D, 0.0);
}

TEST_F(Rb85, DecompositionClosesNorm) {
    std::mt19937 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXcd S(5, 7);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 7; ++j) S(i, j) = cplx(n(rng), n(rng));
        const cplx phi(n(rng), n(rng));
        const auto dec = decompose(phi, S, t, std::abs(n(rng)) * 1e7, std::abs(n(rng)) * 1e8);
        const double total = std::norm(phi) + S.squaredNorm();
        ASSERT_NEAR(dec.p_D + dec.p_B + dec.p_out, total, 1e-10 * total);
        ASSERT_NEAR(dec.total_norm_sq, total, 1e-12 * total);
    }
}

TEST_F(Rb85, GoldenEfficiencies) {
    EXPECT_EQ(efficiency(s, t, B(0.0), 0.0), 1.0);
    for (double th : {0.0, pi / 4, pi / 2}) EXPECT_NEAR(efficiency(s, t, B(th), T_L), 1.0, 1e-10) << th;
    EXPECT_NEAR(efficiency(s, t, B(0.0), T_L / 2), 1.0, 1e-10);
    EXPECT_NEAR(efficiency(s, t, B(0.0), T_L / 4), 0.1808693354, 1e-9);
    EXPECT_NEAR(1.0 / efficiency(s, t, B(0.0), T_L / 4), 5.53, 0.01 * 5.53);
    EXPECT_NEAR(efficiency(s, t, B(pi / 4), T_L / 2), 0.009971, 1e-5);
    EXPECT_NEAR(efficiency(s, t, B(pi / 2), T_L / 2), 0.330294622804, 1e-10);
}

TEST_F(Rb85, TransverseClosedForm) {
    EXPECT_NEAR(efficiency(s, t, B(pi / 2), T_L / 2), transverse_half_period_efficiency(t), 1e-10);
}

TEST_F(Rb85, OffAxisSuppression) {
    const double f0 = efficiency(s, t, B(0.0), T_L / 2);
    const double f45 = efficiency(s, t, B(pi / 4), T_L / 2);
    const double f90 = efficiency(s, t, B(pi / 2), T_L / 2);
    EXPECT_LT(f45, f0);
    EXPECT_LT(f45, 0.5 * f90);
}

TEST_F(Rb85, PeriodicAndEvenInTheta) {
    for (double th : {0.0, 0.3, 1.2})
        for (double x : {0.1, 0.37, 0.8}) {
            EXPECT_NEAR(efficiency(s, t, B(th), x * T_L), efficiency(s, t, B(th), (x + 1) * T_L), 1e-10);
            EXPECT_NEAR(efficiency(s, t, B(th), x * T_L), efficiency(s, t, B(-th), x * T_L), 1e-12);
            const double f = efficiency(s, t, B(th), x * T_L);
            EXPECT_GE(f, 0.0);
            EXPECT_LE(f, 1.0 + 1e-12);
        }
}

TEST_F(Rb85, CollapseRateFrozen) { EXPECT_NEAR(collapse_rate(t), 2.898740, 1e-6); }

TEST(CollapseLaw, ShortTimeGaussianAcrossSchemes) {
    struct Case {
        LevelScheme s;
        FieldPolarizations pol;
    };
    const Case cases[] = {{LevelScheme::rb85_d1(), {1, 1}},
                          {scheme(2, 4, 4, -0.5, 0.5), {1, 1}},
                          {scheme(2, 4, 2, 0.25, -0.25), {-1, -1}}};
    for (const auto& c : cases) {
        const auto t = build_coupling_tables(c.s, c.pol);
        const double eta = collapse_rate(t);
        const auto B = MagneticField::from_gauss(0.3);
        const double wL = std::abs(c.s.g_g) * B.omega_B();
        for (double x = 0.0; x <= 0.2 + 1e-12; x += 0.02) {
            const double f = efficiency(c.s, t, B, x / wL);
            EXPECT_LT(std::abs(f - short_time_efficiency(eta, x)), 0.01) << x;
        }
    }
}

TEST(CollapseLaw, SingleStateHasNoCollapse) {
    const auto s = scheme(0, 0, 2, 0.5, -0.5);
    const auto t = build_coupling_tables(s, {1, 1});
    EXPECT_EQ(collapse_rate(t), 0.0);
    EXPECT_NEAR(efficiency(s, t, MagneticField::from_gauss(0.5), 1.3e-6), 1.0, 1e-12);
}

// Reversing the order of the coupled momenta in the CG convention multiplies
// every coefficient by a common phase per level, which leaves f and eta alone.
TEST_F(Rb85, ConventionFlipInvariance) {
    auto flipped = t;
    const double sign_g = (t.F_g.twice + 2 - t.F_e.twice) / 2 % 2 == 0 ? 1.0 : -1.0;
    const double sign_gp = (t.F_gp.twice + 2 - t.F_e.twice) / 2 % 2 == 0 ? 1.0 : -1.0;
    for (auto& c : flipped.C) c *= sign_g;
    for (auto& c : flipped.Cp) c *= sign_gp;
    for (std::size_t i = 0; i < flipped.R.size(); ++i) flipped.R[i] *= sign_g * sign_gp;
    EXPECT_NEAR(collapse_rate(flipped), collapse_rate(t), 1e-14);
    for (double x : {0.1, 0.25, 0.5})
        for (double th : {0.0, 0.7})
            EXPECT_NEAR(efficiency(s, flipped, B(th), x * T_L), efficiency(s, t, B(th), x * T_L), 1e-14);
}

TEST(Oracle, EfficiencyMatchesProjectedZeemanEvolution) {
    const auto s = LevelScheme::rb85_d1();
    const auto t = build_coupling_tables(s, {1, 1});
    const double T_L = 8e-6;
    std::vector<int> partner(t.n_g());
    for (int i = 0; i < t.n_g(); ++i) partner[i] = t.dsp_partner(i);
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
            const double th = a * pi / 8, ts = (0.1 + 0.2 * b) * T_L;
            const auto B = MagneticField::from_larmor_period(T_L, s.g_g, th);
            const double ref = oracle::projected_zeeman_efficiency(t.F_g.twice, t.F_gp.twice, t.R, partner, s.g_g,
                                                                   s.g_gp, B.omega_B(), th, ts, 20000);
            ASSERT_NEAR(efficiency(s, t, B, ts), ref, 1e-8) << th << ' ' << ts;
        }
}

TEST(Oracle, UnequalGFactorsAgainstProjection) {
    const auto s = scheme(2, 4, 4, -0.5, 0.2);
    const auto t = build_coupling_tables(s, {1, 1});
    std::vector<int> partner(t.n_g());
    for (int i = 0; i < t.n_g(); ++i) partner[i] = t.dsp_partner(i);
    const auto B = MagneticField::from_gauss(0.4, 0.9);
    for (double ts : {0.7e-6, 2.3e-6}) {
        const double ref = oracle::projected_zeeman_efficiency(t.F_g.twice, t.F_gp.twice, t.R, partner, s.g_g, s.g_gp,
                                                               B.omega_B(), B.theta, ts, 20000);
        EXPECT_NEAR(efficiency(s, t, B, ts), ref, 1e-8);
    }
}

TEST_F(Rb85, CurveAndSurface) {
    const std::vector<double> times{0.0, T_L / 4, T_L / 2};
    const auto curve = efficiency_curve(s, t, B(0.0), times);
    ASSERT_EQ(curve.samples.size(), 3u);
    EXPECT_NEAR(curve.samples[1].second, 0.1808693354, 1e-9);
    const auto surf = revival_surface(s, t, B(0.0).tesla, {0.0, pi / 2}, times);
    ASSERT_EQ(surf.rows(), 3);
    ASSERT_EQ(surf.cols(), 2);
    EXPECT_NEAR(surf(2, 0), 1.0, 1e-10);
    EXPECT_NEAR(surf(2, 1), 0.330294622804, 1e-10);
    EXPECT_THROW(revival_surface(s, t, 1e-5, {}, times), ConfigError);
}
