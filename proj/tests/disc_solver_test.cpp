#include "acxlab/disc.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace acxlab;

namespace {

using Q = Rational;
using P = RationalPoly;
using S = RationalStructure;
using H = RationalHermitian;

P var(int i) { return P::variable(i); }
P cst(long a, long b = 1) { return P(Q(a, b)); }

// a1 = eps y2 on the first block, a2 = eps x1 on the second: C1 deviation of size eps.
RealStructure small_diagonal(Q eps) {
    return S::diagonal_from_ac(var(3) * eps, cst(1), var(0) * eps, cst(1)).cast<double>();
}

}  // namespace

TEST(DiscSolver, StandardStructureGivesComplexLine) {
    Vec4 p{0.1, -0.2, 0.3, 0.05}, v{0.5, 0.25, -0.5, 1.0};
    Disc d = solve(RealStructure::standard(), disc_spec(p, v));
    EXPECT_LE(d.residual, 1e-12);
    for (auto z : {std::complex<double>(0.3, 0.4), std::complex<double>(-0.7, 0.1)}) {
        Vec4 got = d.eval_real(z);
        // p + x v + y J_st v
        Vec4 want{p[0] + z.real() * v[0] - z.imag() * v[1], p[1] + z.real() * v[1] + z.imag() * v[0],
                  p[2] + z.real() * v[2] - z.imag() * v[3], p[3] + z.real() * v[3] + z.imag() * v[2]};
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(got[i], want[i], 1e-15);
    }
}

TEST(DiscSolver, ConstantStructureGivesAffineDisc) {
    // Constant J: u = p + x v + y J v solves u_y = J u_x exactly.
    RealStructure j = S::diagonal(cst(1, 10), cst(-101, 100), cst(1), cst(0), cst(-1), cst(1)).cast<double>();
    Vec4 p{0.0, 0.1, 0.2, 0.0}, v{1.0, 0.0, 0.5, 0.5};
    DiscSpec spec = disc_spec(p, v);
    spec.radius_scale = 0.25;
    Disc d = solve(j, spec);
    EXPECT_LE(d.residual, 1e-12);
    Vec4 rv = scale4(v, 0.25);
    Vec4 jv = matvec(j.eval(p), rv);
    std::complex<double> z(0.2, -0.6);
    Vec4 got = d.eval_real(z);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(got[i], p[i] + z.real() * rv[i] + z.imag() * jv[i], 1e-12);
}

TEST(DiscSolver, SmallDiagonalStructureConverges) {
    RealStructure j = small_diagonal(Q(1, 10));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int trial = 0; trial < 20; ++trial) {
        Vec4 p{u(rng), u(rng), u(rng), u(rng)};
        Vec4 v{u(rng), u(rng), u(rng), u(rng)};
        DiscSpec spec = disc_spec(p, v);
        Disc d = solve(j, spec);
        EXPECT_LE(d.residual, 1e-8) << trial;
        EXPECT_LE(d.iterations, 50) << trial;
        // Prescribed jet: u(0) = p, u_x(0) = v.
        Vec4 u0 = d.eval_real(0.0), ux = d.dx(0.0);
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(u0[i], p[i], 1e-14);
            EXPECT_NEAR(ux[i], v[i], 1e-14);
        }
    }
}

TEST(DiscSolver, LargeDeviationRaisesPrecondition) {
    try {
        solve(small_diagonal(Q(2)), disc_spec({0.0, 0.0, 0.5, 0.5}, {1.0, 0.0, 0.0, 0.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PreconditionSmallness);
    }
}

TEST(DiscSolver, JetErrors) {
    DiscSpec spec;
    spec.jet = {Vec4{}};
    EXPECT_THROW(solve(RealStructure::standard(), spec), Error);
    spec = disc_spec({}, {1.0, 0.0, 0.0, 0.0});
    spec.series_order = 3;
    spec.jet.resize(6);
    try {
        solve(RealStructure::standard(), spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::JetTooShort);
    }
}

TEST(DiscSolver, HigherJetIsRespected) {
    // Second x-derivative (2, 0, 0, 2) for J_st gives u = (zeta + zeta^2, zeta^2).
    DiscSpec spec = disc_spec({}, {1.0, 0.0, 0.0, 0.0}, {{2.0, 0.0, 2.0, 0.0}});
    Disc d = solve(RealStructure::standard(), spec);
    std::complex<double> z(0.3, 0.2);
    CPoint w = d.eval(z);
    EXPECT_NEAR(std::abs(w[0] - (z + z * z)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(w[1] - z * z), 0.0, 1e-15);
}

TEST(ContactOrder, ExactOnModelsWithStandardDiscs) {
    using B = BiSeries<Q>;
    const int N = 12;
    B zeta = B::zeta(N), zero(N);
    // rho = Re z2 + |z1|^4 along u = (zeta, 0): |zeta|^4, order 4, multiplicity 1.
    H m2 = H::re_z2() + H::modulus_power(2, 0, Q(1));
    auto c = contact_order(m2, zeta, zero, 10);
    EXPECT_EQ(c.order, 4);
    EXPECT_EQ(c.multiplicity, 1);
    // Along u = (zeta^2, 0): order 8, multiplicity 2.
    c = contact_order(m2, zeta * zeta, zero, 10);
    EXPECT_EQ(c.order, 8);
    EXPECT_EQ(c.multiplicity, 2);
    // Along the complex line u = (0, zeta) the defining function is Re zeta: order 1.
    c = contact_order(m2, zero, zeta, 10);
    EXPECT_EQ(c.order, 1);
    // Vanishing beyond the cap is reported as exceeding it.
    c = contact_order(H::modulus_power(6, 0, Q(1)), zeta, zero, 10);
    EXPECT_TRUE(c.exceeds_cap());
    EXPECT_THROW(contact_order(m2, zeta, zero, 20), Error);
}

TEST(ContactOrder, FloatingDiscFromSolver) {
    DiscSpec spec = disc_spec({}, {1.0, 0.0, 0.0, 0.0});
    Disc d = solve(RealStructure::standard(), spec);
    H m3 = H::re_z2() + H::modulus_power(3, 0, Q(1));
    auto c = contact_order(m3, d, 10);
    EXPECT_EQ(c.order, 6);
    EXPECT_EQ(c.multiplicity, 1);
}

TEST(LeviViaDisc, QuadraticModelIsExactForStandard) {
    // rho = |z1|^2 + Re z2 along u = p + r v zeta: Laplacian / r^2 = 4|v1|^2.
    H rho = H::re_z2() + H::modulus_power(1, 0, Q(1));
    auto f = PolyField::from_hermitian(rho).field();
    auto res = levi_via_disc(f, RealStructure::standard(), {0.1, 0.0, -0.2, 0.0}, {0.6, 0.8, 0.0, 0.0});
    EXPECT_NEAR(res.value, 4.0, 1e-9);
    EXPECT_TRUE(std::isinf(res.observed_order));
}

TEST(LeviViaDisc, QuarticModelShowsSecondOrderStencil) {
    H rho = H::re_z2() + H::modulus_power(2, 0, Q(1));
    auto f = PolyField::from_hermitian(rho).field();
    Vec4 p{0.3, 0.1, 0.0, 0.0}, v{1.0, 0.0, 0.0, 0.0};
    auto res = levi_via_disc(f, RealStructure::standard(), p, v);
    // 16 |p1|^2 |v1|^2 for |z1|^4.
    EXPECT_NEAR(res.value, 16.0 * 0.1, 1e-9);
    EXPECT_NEAR(res.observed_order, 2.0, 0.1);
}
