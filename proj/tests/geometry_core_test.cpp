#include "acxlab/structure.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace acxlab;

namespace {

using Q = Rational;
using P = RationalPoly;
using S = RationalStructure;
using D = Diffeomorphism<Q>;

P var(int i) { return P::variable(i); }
P cst(long a, long b = 1) { return P(Q(a, b)); }

S y2_structure() {
    // a1 = y2, c1 = 1, b1 = -(1 + y2^2); second block standard.
    return S::diagonal(var(3), -(cst(1) + var(3) * var(3)), cst(1), cst(0), cst(-1), cst(1));
}

void expect_same_structure(const S& a, const S& b) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_EQ(a.entry(i, j), b.entry(i, j)) << i << "," << j;
}

}  // namespace

TEST(ValidateStructure, StandardIsExactAndNormalized) {
    auto rep = validate_structure(S::standard(), SampleGrid::box_grid(Box::unit(), 3));
    EXPECT_EQ(rep.max_deviation, 0.0);
    EXPECT_TRUE(rep.normalized);
    EXPECT_TRUE(rep.diagonal);
    ASSERT_TRUE(rep.exact_identity.has_value());
    EXPECT_TRUE(*rep.exact_identity);
}

TEST(ValidateStructure, ViolatingDiagonalBlockIsDetected) {
    // a1 = y2, b1 = -1, c1 = 1: a1^2 + b1 c1 = y2^2 - 1.
    S j = S::diagonal(var(3), cst(-1), cst(1), cst(0), cst(-1), cst(1));
    auto rep = validate_structure(j, SampleGrid::box_grid(Box::unit(), 3));
    EXPECT_NEAR(rep.max_deviation, 1.0, 1e-15);  // |y2|^2 at y2 = +-1
    EXPECT_FALSE(*rep.exact_identity);
}

TEST(ValidateStructure, DiagonalWithCompensatingEntriesIsExact) {
    auto rep = validate_structure(y2_structure(), SampleGrid::box_grid(Box::unit(), 4));
    EXPECT_EQ(rep.max_deviation, 0.0);
    EXPECT_TRUE(*rep.exact_identity);
    EXPECT_TRUE(rep.diagonal);
    EXPECT_TRUE(rep.normalized);

    // The other printed triple (b1 = -1, c1 = 1 + y2^2) also squares to -Id.
    S other = S::diagonal(var(3), cst(-1), cst(1) + var(3) * var(3), cst(0), cst(-1), cst(1));
    EXPECT_TRUE(*validate_structure(other, SampleGrid::box_grid(Box::unit(), 2)).exact_identity);
}

TEST(ValidateStructure, Errors) {
    EXPECT_THROW(validate_structure(S::standard(), SampleGrid{}), Error);
    SampleGrid outside;
    outside.points.push_back({2.0, 0.0, 0.0, 0.0});
    try {
        validate_structure(S::standard(), outside);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CoefficientDomainMismatch);
    }
}

TEST(ValidateStructure, DiagonalFromAcKeepsIdentity) {
    S j = S::diagonal_from_ac(var(2) * Q(1, 3) + var(1) * var(3), cst(2), var(3) * Q(1, 5), cst(1));
    EXPECT_TRUE(*validate_structure(j, SampleGrid::box_grid(Box::unit(), 2)).exact_identity);
    EXPECT_THROW(S::diagonal_from_ac(var(2), var(1) + cst(2), cst(0), cst(1)), Error);
}

TEST(Pushforward, IdentityLeavesStructureUnchanged) {
    expect_same_structure(pushforward(y2_structure(), D::identity()), y2_structure());
}

TEST(Pushforward, HolomorphicShearPreservesStandard) {
    std::vector<Complex<Q>> c{Complex<Q>(Q(0)), Complex<Q>(Q(0)), Complex<Q>(Q(1), Q(2)), Complex<Q>(Q(0)),
                              Complex<Q>(Q(-3, 7), Q(1, 2))};
    S out = pushforward(S::standard(), D::shear(c));
    EXPECT_TRUE(out.is_standard());
}

TEST(Pushforward, AnisotropicDilationRescalesNormalVariable) {
    // (z1, z2) -> (z1/tau, z2/delta): a1 -> delta y2, b1 -> -(1 + delta^2 y2^2).
    Q tau(1, 10), delta(1, 100);
    S out = pushforward(y2_structure(), D::dilation(Q(1) / tau, Q(1) / delta));
    EXPECT_EQ(out.kind(), StructureKind::diagonal);
    EXPECT_EQ(out.entry(0, 0), var(3) * delta);
    EXPECT_EQ(out.entry(0, 1), -(cst(1) + var(3) * var(3) * Q(delta * delta)));
    EXPECT_EQ(out.entry(1, 0), cst(1));
}

TEST(Pushforward, IsFunctorialExactly) {
    Mat4T<Q> a = identity4<Q>();
    a[0][2] = Q(1, 2);
    a[3][1] = Q(-2, 3);
    a[2][2] = Q(3);
    D f = D::linear(a);
    D g = compose(D::shear({Complex<Q>(Q(0)), Complex<Q>(Q(0)), Complex<Q>(Q(1, 3), Q(-1))}),
                  D::translation({Q(1, 4), Q(0), Q(-1, 2), Q(1, 8)}));
    S j = y2_structure();
    expect_same_structure(pushforward(j, compose(f, g)), pushforward(pushforward(j, g), f));
}

TEST(Pushforward, ResultSquaresToMinusIdentity) {
    D g = compose(D::shear({Complex<Q>(Q(0)), Complex<Q>(Q(0)), Complex<Q>(Q(1), Q(1))}),
                  D::translation({Q(1, 4), Q(0), Q(-1, 2), Q(1, 8)}));
    S out = pushforward(y2_structure(), g);
    EXPECT_EQ(out.kind(), StructureKind::general);
    EXPECT_TRUE(*validate_structure(out, SampleGrid::box_grid(out.domain(), 2)).exact_identity);
}

TEST(Pushforward, FunctorialOnFloatingGrid) {
    RealStructure j = y2_structure().cast<double>();
    Diffeomorphism<double> f = Diffeomorphism<double>::shear({{0.0}, {0.0}, Complex<double>(0.3, -0.2)});
    Diffeomorphism<double> g = Diffeomorphism<double>::dilation(0.5, 0.25);
    RealStructure lhs = pushforward(j, compose(f, g));
    RealStructure rhs = pushforward(pushforward(j, g), f);
    for (const auto& p : SampleGrid::box_grid(Box::unit(), 4).points) {
        Mat4 a = lhs.eval(p), b = rhs.eval(p);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) EXPECT_NEAR(a[r][c], b[r][c], 1e-9);
    }
}

TEST(NormalizeChart, StandardAtOriginIsIdentity) {
    auto res = normalize_chart(S::standard(), {Q(0), Q(0), Q(0), Q(0)}, 0.1);
    EXPECT_TRUE(res.structure.is_standard());
    EXPECT_EQ(res.scale, Q(1));
    for (int i = 0; i < 4; ++i) EXPECT_EQ(res.chart.forward()[i], var(i));
}

TEST(NormalizeChart, ConjugatesNonstandardValueAtPoint) {
    // J(0) has block (1 -2 / 1 -1): a = 1, c = 1, b = -2 (a^2 + b c = -1).
    S j = S::diagonal_from_ac(cst(1) + var(2) * Q(1, 10), cst(1), cst(0), cst(1));
    auto res = normalize_chart(j, {Q(0), Q(0), Q(0), Q(0)}, 0.5);
    Mat4T<Q> at0 = res.structure.eval_exact({Q(0), Q(0), Q(0), Q(0)});
    EXPECT_EQ(at0, standard_matrix<Q>());
    EXPECT_LE(res.sup_deviation, 0.5);
}

TEST(NormalizeChart, DilationScalesDeviationLinearly) {
    // J = J_st + O(|z2|) with unit coefficient: a1 = x2 + y2.
    S j = S::diagonal_from_ac(var(2) + var(3), cst(1), cst(0), cst(1), Box::centered({0.0, 0.0, 0.0, 0.0}, 2.0));
    auto res = normalize_chart(j, {Q(0), Q(0), Q(0), Q(0)}, 0.01);
    EXPECT_LE(res.sup_deviation, 0.01);
    EXPECT_LE(res.scale, Q(1, 100));
    Vec4 p0 = res.chart.apply({0.0, 0.0, 0.0, 0.0});
    EXPECT_EQ(norm4(p0), 0.0);
}

TEST(NormalizeChart, ChartSendsPointToOrigin) {
    S j = y2_structure();
    std::array<Q, 4> p{Q(1, 4), Q(-1, 8), Q(0), Q(1, 2)};
    auto res = normalize_chart(j, p, 0.2);
    EXPECT_EQ(res.chart.apply_exact(p), (std::array<Q, 4>{Q(0), Q(0), Q(0), Q(0)}));
    EXPECT_EQ(res.structure.eval_exact({Q(0), Q(0), Q(0), Q(0)}), standard_matrix<Q>());
}

TEST(NormalizeChart, UnreachableToleranceThrows) {
    // Two halvings cannot bring a unit-slope deviation below 1e-6.
    S j = S::diagonal_from_ac(var(2), cst(1), cst(0), cst(1));
    try {
        normalize_chart(j, {Q(0), Q(0), Q(0), Q(0)}, 1e-6, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CannotReachTolerance);
    }
}

TEST(Complexify, StandardStructure) {
    auto c = complexify(S::standard());
    using CP = Poly4<Complex<Q>>;
    CP i(Complex<Q>(Q(0), Q(1)));
    EXPECT_EQ(c.A11(), i);
    EXPECT_EQ(c.A22(), i);
    EXPECT_TRUE(c.B11().is_zero());
    EXPECT_TRUE(c.B22().is_zero());
    EXPECT_TRUE(c.A12().is_zero());
    EXPECT_TRUE(c.B12().is_zero());
}

TEST(Complexify, DiagonalHasNoCrossTerms) {
    auto c = complexify(y2_structure());
    EXPECT_TRUE(c.A12().is_zero());
    EXPECT_TRUE(c.B12().is_zero());
    EXPECT_TRUE(c.A[1][0].is_zero());
    EXPECT_TRUE(c.B[1][0].is_zero());
    EXPECT_FALSE(c.B11().is_zero());
}

TEST(Complexify, RoundTripIsExact) {
    D g = compose(D::shear({Complex<Q>(Q(0)), Complex<Q>(Q(0)), Complex<Q>(Q(1), Q(1))}),
                  D::translation({Q(1, 4), Q(0), Q(-1, 2), Q(1, 8)}));
    S j = pushforward(y2_structure(), g);
    expect_same_structure(decomplexify(complexify(j)), j);
}

TEST(Complexify, ShearedStructureCrossTermFollowsShearDerivative) {
    // After z2 -> z2 - s z1^2 the cross coefficient B12 is nonzero and vanishes with a1.
    std::vector<Complex<Q>> c{Complex<Q>(Q(0)), Complex<Q>(Q(0)), Complex<Q>(Q(-1, 2))};
    S sheared = pushforward(y2_structure(), D::shear(c));
    auto cx = complexify(sheared);
    EXPECT_FALSE(cx.B[1][0].is_zero() && cx.B[0][1].is_zero());
    auto cx_st = complexify(pushforward(S::standard(), D::shear(c)));
    EXPECT_TRUE(cx_st.B[0][1].is_zero());
    EXPECT_TRUE(cx_st.B[1][0].is_zero());
}
