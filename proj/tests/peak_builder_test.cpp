#include "acxlab/peak.hpp"

#include <gtest/gtest.h>

using namespace acxlab;

namespace {

using Q = Rational;
using CQ = Complex<Q>;
using H = RationalHermitian;
using P = RationalPoly;
using S = RationalStructure;

P var(int i) { return P::variable(i); }
P cst(long a, long b = 1) { return P(Q(a, b)); }

H model(int m) { return H::re_z2() + H::modulus_power(m, 0, Q(1)); }

HomogeneousSlice<Q> slice(const H& h, int d) { return pure_z1_slice(h, d); }

PeakOptions light() {
    PeakOptions o;
    o.psh_points = 2000;
    o.psh_directions = 32;
    o.closure_points = 4000;
    return o;
}

}  // namespace

TEST(FSFunction, ConstantWorksForModulusFourth) {
    // Delta((1 - 1.5 delta)|z1|^4) = 16 (1 - 1.5 delta) |z1|^2.
    auto h = slice(H::modulus_power(2, 0, Q(1)), 4);
    FSFunction f;
    f.degree = 4;
    f.delta = 0.1;
    f.a.assign(8, 0.0);
    f.b.assign(8, 0.0);
    FSCheck c = check_fs_function(h, f);
    EXPECT_TRUE(c.ok());
    // Condition 4 normalized margin: (16 - 0.1 * 24 - 1.1 * 0.01) / (1.1 * 0.01).
    EXPECT_NEAR(c.sum_lap, (13.6 - 0.011) / 0.011, 1e-9);
    FSFunction found = find_fs_function(h);
    EXPECT_EQ(found.delta, 0.5);
    EXPECT_EQ(found.a0, -1.5);
}

TEST(FSFunction, ConstantWorksForModulusSquared) {
    auto h = slice(H::modulus_power(1, 0, Q(1)), 2);
    FSFunction f;
    f.degree = 2;
    f.delta = 0.1;
    FSCheck c = check_fs_function(h, f);
    EXPECT_TRUE(c.ok());
    // Delta((1 - 0.15)|z1|^2) = 3.4 against 1.1 * 0.01.
    EXPECT_NEAR(c.sum_lap, (3.4 - 0.011) / 0.011, 1e-9);
}

TEST(FSFunction, HarmonicComponentDoesNotEnterNorm) {
    H h = H::modulus_power(2, 0, Q(1)) + H::real_part({4, 0, 0, 0}, CQ(Q(9, 10)));
    auto s = slice(h, 4);
    EXPECT_NEAR(slice_norm(nonharmonic_part(s)), 1.0, 1e-12);
    FSFunction f = find_fs_function(s);
    EXPECT_TRUE(check_fs_function(s, f).ok());
}

TEST(FSFunction, VanishingLaplacianExhaustsBoundedDegreeAnsatz) {
    // Delta H = (16 + 16 cos 2 theta) r^2 vanishes at theta = pi/2; condition (3) there
    // needs 16 g + g'' > 0 with g in [-1.9, -1.1], out of reach for degree <= 8.
    H h = H::modulus_power(2, 0, Q(1)) + H::real_part({3, 1, 0, 0}, CQ(Q(4, 3)));
    auto s = slice(h, 4);
    FSSearchOptions o;
    o.delta_halvings = 4;
    o.ansatz_steps = 40;
    try {
        find_fs_function(s, o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SearchExhausted);
    }
}

TEST(FSFunction, AngularLaplacianMatchesPolynomialLaplacian) {
    H h = H::modulus_power(2, 0, Q(1)) + H::real_part({3, 1, 0, 0}, CQ(Q(1, 3), Q(1, 5)));
    auto s = slice(h, 4);
    AngularField af = slice_angular(s);
    H lap = h.laplacian_z1();
    for (double t : {0.0, 0.7, 2.1, 4.0}) {
        std::complex<double> z = std::polar(1.0, t);
        EXPECT_NEAR(af.normalized_laplacian(t), lap.eval(CPoint{z, 0.0}), 1e-12);
        EXPECT_NEAR(af({z.real(), z.imag(), 0.0, 0.0}).value, h.eval(CPoint{z, 0.0}), 1e-12);
    }
}

TEST(PeakBuilder, ModelM2StandardStructure) {
    BoundaryPointData bp{model(2), S::standard()};
    NormalForm nf = extract_normal_form(bp);
    PeakBuild b = build_peak(nf, RealStructure::standard(), light());
    EXPECT_EQ(b.verification.phi_at_origin, 0.0);
    EXPECT_LT(b.verification.sampled_max, 0.0);
    EXPECT_GE(b.verification.psh.min_value, -1e-6);
    EXPECT_TRUE(b.verification.fs.ok());
    EXPECT_EQ(b.peak.value({0.0, 0.0, 0.0, 0.0}), 0.0);
}

TEST(PeakBuilder, TypeTwoModel) {
    BoundaryPointData bp{model(1), S::standard()};
    NormalForm nf = extract_normal_form(bp);
    EXPECT_EQ(nf.m, 1);
    PeakBuild b = build_peak(nf, RealStructure::standard(), light());
    EXPECT_TRUE(b.verification.ok());
}

TEST(PeakBuilder, NormalizedDiagonalStructure) {
    // a1 = a2 = x2 / 10: J = J_st on {z2 = 0}.
    RealStructure j = S::diagonal_from_ac(var(2) * Q(1, 10), cst(1), var(2) * Q(1, 10), cst(1)).cast<double>();
    BoundaryPointData bp{model(2), S::standard()};
    PeakBuild b = build_peak(extract_normal_form(bp), j, light());
    EXPECT_TRUE(b.verification.ok());
}

TEST(Localization, CutoffPlateausAndMonotone) {
    Cutoff th{0.5};
    EXPECT_EQ(th.value(0.1), 0.1);
    EXPECT_EQ(th.value(0.34), 1.0);
    EXPECT_EQ(th.value(2.0), 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
        double s = 0.4 * i / 400.0;
        double v = th.value(s);
        EXPECT_GE(v, prev - 1e-15);
        prev = v;
        // Derivatives against central differences.
        if (s > 0.01) {
            double h = 1e-5;
            auto e = th.eval(s);
            EXPECT_NEAR(e[1], (th.value(s + h) - th.value(s - h)) / (2 * h), 1e-5);
            EXPECT_NEAR(e[2], (th.eval(s + h)[1] - th.eval(s - h)[1]) / (2 * h), 1e-3);
        }
    }
}

TEST(Localization, GadgetJetMatchesFiniteDifferences) {
    LocalizationGadget g;
    g.center = {0.1, 0.0, -0.1, 0.05};
    g.A = 2.0;
    g.B = 10.0;
    Vec4 x{0.3, 0.2, 0.1, -0.2};
    Jet2 j = g(x);
    const double h = 1e-5;
    for (int i = 0; i < 4; ++i) {
        Vec4 xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        EXPECT_NEAR(j.grad[i], (g(xp).value - g(xm).value) / (2 * h), 1e-6);
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(j.hess[i][k], (g(xp).grad[k] - g(xm).grad[k]) / (2 * h), 1e-4);
    }
}

TEST(Localization, StandardStructureSearch) {
    LocalizationGadget g = build_localization(RealStructure::standard(), {}, 0.5);
    EXPECT_GE(g.psh.min_value, -1e-6);
    EXPECT_GE(g.A, 1.0);
    EXPECT_LE(g.B, 1e6);
    // Plateau: for |z|^2 >= 2r/3 and A|z| >= 2r/3 the function is 1 + B|z|^2 (log 1 = 0).
    Vec4 far{0.7, 0.0, 0.0, 0.0};
    EXPECT_NEAR(g(far).value, 1.0 + g.B * 0.49, 1e-12);
}

TEST(Localization, PerturbedDiagonalStructure) {
    RealStructure j = S::diagonal_from_ac(var(2) * Q(1, 20), cst(1), var(0) * Q(1, 20), cst(1)).cast<double>();
    LocalizationGadget g = build_localization(j, {}, 0.5);
    EXPECT_GE(g.psh.min_value, -1e-6);
}

TEST(PsiWeight, DisplayAndZeroAtCenter) {
    H psi = psi_weight({CQ(Q(0)), CQ(Q(0))}, 2);
    H want = H::modulus_power(2, 0, Q(1)) + H::modulus_power(0, 1, Q(1)) + H::modulus_power(1, 1, Q(1));
    EXPECT_EQ(psi.raw(), want.raw());
    std::array<CQ, 2> q{CQ(Q(1, 3), Q(-1, 2)), CQ(Q(1, 4))};
    H shifted = psi_weight(q, 3);
    EXPECT_EQ(shifted.eval(q[0], q[1]), Q(0));
    EXPECT_EQ(levi_standard(psi, {CQ(Q(0)), CQ(Q(0))}, {CQ(Q(0)), CQ(Q(1))}), Q(4));
}
