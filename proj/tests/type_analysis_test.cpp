#include "acxlab/type.hpp"

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

BoundaryPointData bp(const H& rho, const S& j = S::standard()) { return {rho, j}; }

}  // namespace

TEST(RegularType, ModelsUnderStandardStructure) {
    EXPECT_EQ(regular_type(bp(model(1)), 12).value(), 2);
    EXPECT_EQ(regular_type(bp(model(2)), 12).value(), 4);
    EXPECT_EQ(regular_type(bp(model(3)), 12).value(), 6);
    H m4 = model(2) + H::real_part({4, 0, 0, 0}, CQ(Q(1, 2)));  // |z1|^4 + (1/2) Re z1^4
    EXPECT_EQ(regular_type(bp(m4), 12).value(), 4);
}

TEST(RegularType, HarmonicQuarticIsCancelledByShearDisc) {
    // rho = Re z2 + Re z1^4 + |z1|^6: the disc (zeta, -zeta^4) kills Re zeta^4, leaving |zeta|^6.
    H rho = H::re_z2() + H::real_part({4, 0, 0, 0}, CQ(Q(1))) + H::modulus_power(3, 0, Q(1));
    auto rep = regular_type(bp(rho), 12);
    EXPECT_EQ(rep.value(), 6);
    EXPECT_EQ(rep.disc.w2.get(4, 0), CQ(Q(-1)));
    using B = BiSeries<Q>;
    B w2(12);
    w2.at(4, 0) = CQ(Q(-1));
    auto c = contact_order(rho, B::zeta(12), w2, 12);
    EXPECT_EQ(c.order, 6);
}

TEST(RegularType, ZeroCompositionReportsAboveCap) {
    H rho = H::re_z2() + H::modulus_power(0, 1, Q(1));  // contains the complex line {z2 = 0}
    auto rep = regular_type(bp(rho), 10);
    EXPECT_TRUE(rep.exceeds_cap());
    EXPECT_EQ(rep.disc.label(10), "> 10");
}

TEST(RegularType, NonStandardStructureCrossCheck) {
    // J = J_st on {z2 = 0}: a1 = x2 / 10.
    S j = S::diagonal_from_ac(var(2) * Q(1, 10), cst(1), cst(0), cst(1));
    auto rep = regular_type(bp(model(1), j), 8);
    EXPECT_EQ(rep.value(), 2);
    ASSERT_TRUE(rep.cross_check_order.has_value());
    EXPECT_EQ(*rep.cross_check_order, 2);
    EXPECT_TRUE(rep.findings.empty());
    auto rep2 = regular_type(bp(model(2), j), 8);
    EXPECT_EQ(rep2.value(), 4);
    ASSERT_TRUE(rep2.cross_check_order.has_value());
    EXPECT_EQ(*rep2.cross_check_order, 4);
}

TEST(RegularType, PreconditionsAreChecked) {
    EXPECT_THROW(regular_type(bp(model(2)), 1), Error);
    EXPECT_THROW(regular_type(bp(model(2) + H::constant(Q(1))), 8), Error);
    EXPECT_THROW(regular_type(bp(model(2) + H::real_part({1, 0, 0, 0}, CQ(Q(1)))), 8), Error);
}

TEST(DAngeloType, SingularDiscsDoNotExceedRegularType) {
    auto rep = dangelo_type(bp(model(2)), 8, 3);
    EXPECT_EQ(rep.value, Q(4));
    EXPECT_TRUE(rep.agrees_with_regular);
    for (int m = 1; m <= 3; ++m) {
        auto r = dangelo_type(bp(model(m)), 8, 3);
        EXPECT_EQ(r.value, Q(2 * m));
        EXPECT_EQ(r.regular, 2 * m);
        EXPECT_TRUE(r.agrees_with_regular);
    }
    // (zeta^2, 0) on M2: order 8, ratio 8 / 2.
    auto t = cancellation_disc(model(2), 2, 16);
    EXPECT_EQ(t.order, 8);
}

TEST(NormalForm, ReadsModelData) {
    auto nf = extract_normal_form(bp(model(2)));
    EXPECT_EQ(nf.m, 2);
    EXPECT_EQ(nf.h2m.poly.raw(), H::modulus_power(2, 0, Q(1)).raw());
    ASSERT_EQ(nf.rho_k.size(), 1u);
    EXPECT_TRUE(is_zero(nf.rho_k[0]));
    EXPECT_TRUE(nf.subharmonic_on_sample);
}

TEST(NormalForm, ReadsMixedCoefficient) {
    auto nf = extract_normal_form(bp(model(2) + H::real_part({1, 0, 1, 0}, CQ(Q(1)))));
    EXPECT_EQ(nf.m, 2);
    EXPECT_EQ(nf.rho_k[0], CQ(Q(1)));
}

TEST(NormalForm, ConjugateMixedTermIsWitness) {
    try {
        extract_normal_form(bp(model(2) + H::real_part({1, 0, 0, 1}, CQ(Q(1)))));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotPseudoconvexWitness);
    }
}

TEST(NormalForm, ShearRemovesLowerHarmonicTerms) {
    H rho = H::re_z2() + H::real_part({4, 0, 0, 0}, CQ(Q(1))) + H::modulus_power(3, 0, Q(1));
    auto nf = extract_normal_form(bp(rho));
    EXPECT_EQ(nf.m, 3);
    EXPECT_EQ(nf.h2m.poly.raw(), H::modulus_power(3, 0, Q(1)).raw());
    EXPECT_TRUE(pure_z1_slice(nf.normalized, 4).poly.is_zero());
}

TEST(NormalForm, DilationKeepsTypeAndScalesSlice) {
    H rho = model(2) + H::modulus_power(3, 0, Q(1)) + H::modulus_power(0, 1, Q(1));
    for (Q t : {Q(1, 2), Q(1, 3), Q(1, 10)}) {
        H d = model_dilate_root(rho, 2, t);
        auto nf = extract_normal_form(bp(d));
        EXPECT_EQ(nf.m, 2);
        EXPECT_EQ(nf.h2m.poly.raw(), H::modulus_power(2, 0, Q(1)).raw());
    }
}
