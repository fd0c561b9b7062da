#include "acxlab/disc.hpp"
#include "acxlab/levi.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace acxlab;

namespace {

using Q = Rational;
using CQ = Complex<Q>;
using H = RationalHermitian;
using P = RationalPoly;
using S = RationalStructure;

P var(int i) { return P::variable(i); }
P cst(long a, long b = 1) { return P(Q(a, b)); }

H sample_rho() {
    // |z1|^4 + Re(z1^2 conj z2) + 3|z1|^2|z2|^2 + Re(i z1^3)
    return H::modulus_power(2, 0, Q(1)) + H::real_part({2, 0, 0, 1}, CQ(Q(1))) +
           H::real_part({1, 1, 1, 1}, CQ(Q(3))) + H::real_part({3, 0, 0, 0}, CQ(Q(0), Q(1)));
}

Q rnd(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-5, 5), den(1, 6);
    Q q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

H random_rho(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> ex(0, max_degree), count(1, 8);
    H r = H::constant(Q(0));
    int n = count(rng);
    for (int t = 0; t < n; ++t) {
        Exp4 e;
        do {
            e = {ex(rng), ex(rng), ex(rng), ex(rng)};
        } while (total_degree(e) > max_degree);
        r = r + H::real_part(e, CQ(rnd(rng), rnd(rng)));
    }
    return r;
}


}  // namespace

TEST(LeviStandard, MatchesSymbolicValue) {
    // 4 sum rho_{j kbar} v_j conj(v_k) at p = (1/2 + i/3, -1/4), v = (1, i/2).
    std::array<CQ, 2> p{CQ(Q(1, 2), Q(1, 3)), CQ(Q(-1, 4))};
    std::array<CQ, 2> v{CQ(Q(1)), CQ(Q(0), Q(1, 2))};
    EXPECT_EQ(levi_standard(sample_rho(), p, v), Q(179, 18));
}

TEST(LeviStandard, ModulusSquaredGivesFourTimesNorm) {
    H rho = H::modulus_power(1, 0, Q(1));
    std::array<CQ, 2> p{CQ(Q(3)), CQ(Q(1))};
    EXPECT_EQ(levi_standard(rho, p, {CQ(Q(1), Q(2)), CQ(Q(5))}), Q(20));
}

TEST(LeviGeneral, ExactRealFormulaEqualsComplexFormulaForStandard) {
    std::mt19937_64 rng(7);
    S st = S::standard();
    for (int trial = 0; trial < 100; ++trial) {
        H rho = random_rho(rng, 6);
        std::array<Q, 4> p{rnd(rng), rnd(rng), rnd(rng), rnd(rng)};
        std::array<Q, 4> v{rnd(rng), rnd(rng), rnd(rng), rnd(rng)};
        Q a = levi_general_exact(rho, st, p, v);
        Q b = levi_standard(rho, {CQ(p[0], p[1]), CQ(p[2], p[3])}, {CQ(v[0], v[1]), CQ(v[2], v[3])});
        ASSERT_EQ(a, b) << "trial " << trial;
    }
}

TEST(LeviGeneral, FloatingAgreesWithExact) {
    S j = S::diagonal_from_ac(var(3) * Q(1, 10), cst(1), var(0) * Q(1, 20), cst(1));
    H rho = sample_rho() + H::re_z2();
    std::array<Q, 4> p{Q(1, 3), Q(-1, 5), Q(1, 7), Q(1, 2)};
    std::array<Q, 4> v{Q(1), Q(-2, 3), Q(1, 4), Q(1, 2)};
    Q exact = levi_general_exact(rho, j, p, v);
    double fl = levi_general(PolyField::from_hermitian(rho).field(), j.cast<double>(),
                             {1.0 / 3, -0.2, 1.0 / 7, 0.5}, {1.0, -2.0 / 3, 0.25, 0.5});
    EXPECT_NEAR(fl, exact.get_d(), 1e-12 * (1.0 + std::abs(exact.get_d())));
}

TEST(LeviGeneral, SignConventionFlipsValue) {
    H rho = H::modulus_power(1, 0, Q(1));
    auto f = PolyField::from_hermitian(rho).field();
    RealStructure st = RealStructure::standard();
    Vec4 p{0.1, 0.2, 0.0, 0.0}, v{1.0, 0.0, 0.0, 0.0};
    EXPECT_NEAR(levi_general(f, st, p, v, LeviSign::disc_oracle), 4.0, 1e-14);
    EXPECT_NEAR(levi_general(f, st, p, v, LeviSign::lemma_literal), -4.0, 1e-14);
}

TEST(LeviGeneral, ConstantStructureClosedForm) {
    // For constant J the J-disc is affine: u = p + x v + y Jv, so the Laplacian is v'Hv + (Jv)'H(Jv).
    S j = S::diagonal(cst(1, 10), cst(-101, 100), cst(1), cst(0), cst(-1), cst(1));
    H rho = sample_rho();
    std::array<Q, 4> p{Q(1, 4), Q(0), Q(-1, 3), Q(1, 5)};
    std::array<Q, 4> v{Q(1), Q(2), Q(-1), Q(1, 2)};
    Poly4<Q> f = rho.to_real();
    Mat4T<Q> jm = j.eval_exact(p);
    std::array<Q, 4> jv = matvec(jm, v);
    Q want(0);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            Q h = f.derivative(a).derivative(b).eval(p);
            want += h * (v[a] * v[b] + jv[a] * jv[b]);
        }
    EXPECT_EQ(levi_general_exact(rho, j, p, v), want);
}

TEST(LeviGeneral, InvalidStructureAtPointThrows) {
    S bad = S::diagonal(var(3), cst(-1), cst(1), cst(0), cst(-1), cst(1));
    auto f = PolyField::from_hermitian(H::re_z2()).field();
    try {
        levi_general(f, bad.cast<double>(), {0.0, 0.0, 0.0, 0.5}, {1.0, 0.0, 0.0, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::StructureInvalidAtPoint);
    }
    EXPECT_THROW(levi_general_exact(H::re_z2(), bad, {Q(0), Q(0), Q(0), Q(1, 2)}, {Q(1), Q(0), Q(0), Q(0)}), Error);
}

TEST(LeviGeneral, AgreesWithDiscLaplacian) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    H rho = sample_rho() + H::re_z2();
    auto f = PolyField::from_hermitian(rho).field();
    std::vector<RealStructure> js{
        RealStructure::standard(),
        S::diagonal_from_ac(var(3) * Q(1, 20), cst(1), cst(0), cst(1)).cast<double>(),
        S::diagonal_from_ac(var(2) * Q(1, 20) + var(3) * Q(1, 40), cst(1), var(0) * Q(1, 20), cst(1)).cast<double>(),
        S::diagonal_from_ac(cst(0), cst(1), var(1) * Q(1, 20), cst(1)).cast<double>()};
    for (const auto& j : js) {
        for (int q = 0; q < 3; ++q) {
            Vec4 p{u(rng), u(rng), u(rng), u(rng)};
            Vec4 v{u(rng), u(rng), u(rng), u(rng)};
            v = scale4(v, 1.0 / norm4(v));
            double lg = levi_general(f, j, p, v);
            DiscLeviResult d = levi_via_disc(f, j, p, v);
            EXPECT_NEAR(lg, d.value, 5e-3 * (1.0 + std::abs(lg)));
            EXPECT_GE(d.observed_order, 1.5);
        }
    }
}

TEST(PshCheck, StrictlyPshModelIsPshOnSample) {
    H rho = H::re_z2() + H::modulus_power(1, 0, Q(1)) + H::modulus_power(0, 1, Q(1));
    auto rep = psh_check(rho, RealStructure::standard(), SampleGrid::box_grid(Box::centered({}, 0.5), 3));
    EXPECT_EQ(rep.verdict, PshVerdict::psh_on_sample);
    EXPECT_GT(rep.min_value, 0.0);
    EXPECT_EQ(rep.directions, 68u);
}

TEST(PshCheck, NegativeModulusHasWitness) {
    H rho = H::modulus_power(0, 1, Q(-1));  // -|z2|^2, Levi value -4|v2|^2
    auto rep = psh_check(rho, RealStructure::standard(), SampleGrid::box_grid(Box::unit(), 2));
    EXPECT_EQ(rep.verdict, PshVerdict::not_psh);
    EXPECT_NEAR(rep.min_value, -4.0, 1e-12);
    EXPECT_NEAR(rep.witness_direction[2] * rep.witness_direction[2] + rep.witness_direction[3] * rep.witness_direction[3],
                1.0, 1e-12);
}

TEST(PshCheck, PluriharmonicIsPshOnSample) {
    H rho = H::real_part({3, 0, 1, 0}, CQ(Q(2), Q(-1)));
    auto rep = psh_check(rho, RealStructure::standard(), SampleGrid::box_grid(Box::unit(), 3));
    EXPECT_EQ(rep.verdict, PshVerdict::psh_on_sample);
    EXPECT_NEAR(rep.min_value, 0.0, 1e-12);
}
