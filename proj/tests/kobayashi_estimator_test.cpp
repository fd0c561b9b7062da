#include "acxlab/kobayashi.hpp"

#include <gtest/gtest.h>

using namespace acxlab;

namespace {

using Q = Rational;
using H = RationalHermitian;
using P = RationalPoly;
using S = RationalStructure;

H unit_disc_cylinder() { return H::modulus_power(1, 0, Q(1)) - H::constant(Q(1)); }
H unit_ball() { return H::modulus_power(1, 0, Q(1)) + H::modulus_power(0, 1, Q(1)) - H::constant(Q(1)); }
H model(int m) { return H::re_z2() + H::modulus_power(m, 0, Q(1)); }

const Vec4 e1{1.0, 0.0, 0.0, 0.0};
const Vec4 e2{0.0, 0.0, 1.0, 0.0};

// sympy: atanh(1/2), and 1/(1 - 1/4) from the Mobius disc (z + 1/2)/(1 + z/2) with derivative 3/4.
const double kPoincareHalf = 0.54930614433405485;
const double kMobiusHalf = 4.0 / 3.0;

}  // namespace

TEST(EstimateMetric, UnitDiscCentreIsIdentityDisc) {
    MetricDomain d(unit_disc_cylinder());
    auto e = estimate_metric(d, {0, 0, 0, 0}, e1);
    EXPECT_EQ(e.upper_method, "disc-found");
    EXPECT_NEAR(e.upper, 1.0, 2e-3);
    EXPECT_GE(e.upper, 1.0);
    ASSERT_TRUE(e.disc_witness.has_value());
    EXPECT_LT(e.disc_witness->max_rho, 0.0);
    EXPECT_EQ(e.lower_method, "trivial-zero");
    EXPECT_LE(e.lower, e.upper);
}

TEST(EstimateMetric, UnitDiscOffCentreAgainstMobius) {
    MetricDomain d(unit_disc_cylinder());
    auto e = estimate_metric(d, {0.5, 0, 0, 0}, e1);
    EXPECT_NEAR(e.upper, kMobiusHalf, 0.1 * kMobiusHalf);
    // No disc inside the domain beats the extremal one.
    EXPECT_GE(e.upper, kMobiusHalf * (1.0 - 1e-3));
}

TEST(EstimateMetric, BallCentreUnitVector) {
    MetricDomain b(unit_ball());
    for (Vec4 v : {e1, e2, Vec4{0.6, 0.0, 0.0, 0.8}}) {
        auto e = estimate_metric(b, {0, 0, 0, 0}, v);
        EXPECT_NEAR(e.upper, 1.0, 0.05);
    }
}

TEST(EstimateMetric, AbsoluteHomogeneity) {
    MetricDomain d(unit_ball());
    Vec4 p{0.2, -0.1, 0.3, 0.0}, v{0.3, 0.4, -0.2, 0.5};
    double base = estimate_metric(d, p, v).upper;
    for (double lambda : {2.0, 10.0}) {
        double scaled = estimate_metric(d, p, scale4(v, lambda)).upper;
        EXPECT_NEAR(scaled / (lambda * base), 1.0, 0.02);
    }
}

TEST(EstimateMetric, DomainInclusionOrdersUppers) {
    MetricDomain big(unit_disc_cylinder());
    MetricDomain small = big.intersect(unit_ball());
    for (Vec4 p : {Vec4{0, 0, 0, 0}, Vec4{0.3, 0.1, 0.2, 0.0}}) {
        for (Vec4 v : {e1, e2}) {
            double ub = estimate_metric(big, p, v).upper;
            double us = estimate_metric(small, p, v).upper;
            EXPECT_LE(ub, us * 1.02);
        }
    }
}

TEST(EstimateMetric, QueryOutsideDomainIsRejected) {
    MetricDomain d(unit_ball());
    try {
        estimate_metric(d, {1.5, 0, 0, 0}, e1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InfeasibleQuery);
    }
}

TEST(EstimateMetric, NonStandardStructureUsesSolvedDiscs) {
    // a1 = x1/10 varies along the disc, so the solver has real work to do.
    RealStructure j = S::diagonal_from_ac(P::variable(0) * Q(1, 10), P(Q(1)), P(Q(0)), P(Q(1))).cast<double>();
    MetricDomain d(model(2), j);
    auto e = estimate_metric(d, {0, 0, -0.01, 0}, e1);
    EXPECT_EQ(e.upper_method, "disc-found");
    ASSERT_TRUE(e.disc_witness.has_value());
    ASSERT_TRUE(e.disc_witness->solved.has_value());
    EXPECT_LE(e.disc_witness->residual, 1e-8);
    EXPECT_GT(e.disc_witness->solved->iterations, 1);
    // Same order of magnitude as the standard-structure value 0.01^(-1/4).
    EXPECT_GT(e.upper, 0.5 * std::pow(0.01, -0.25));
    EXPECT_LT(e.upper, 2.0 * std::pow(0.01, -0.25));
}

TEST(BoundaryDistance, ClosedForms) {
    EXPECT_NEAR(boundary_distance(MetricDomain(unit_ball()), {0.3, 0, 0, 0}), 0.7, 1e-9);
    EXPECT_NEAR(boundary_distance(MetricDomain(model(2)), {0, 0, -1e-3, 0}), 1e-3, 1e-12);
}

TEST(IntegratedDistance, ZeroLength) {
    MetricDomain d(unit_disc_cylinder());
    EXPECT_EQ(integrated_distance(d, {0, 0, 0, 0}, {0, 0, 0, 0}).value, 0.0);
}

TEST(IntegratedDistance, PoincareDistanceAndSymmetry) {
    MetricDomain d(unit_disc_cylinder());
    auto fwd = integrated_distance(d, {0, 0, 0, 0}, {0.5, 0, 0, 0});
    EXPECT_NEAR(fwd.value, kPoincareHalf, 0.15 * kPoincareHalf);
    ASSERT_EQ(fwd.rounds.size(), 4u);
    for (std::size_t i = 1; i < fwd.rounds.size(); ++i) EXPECT_LE(fwd.rounds[i], fwd.rounds[i - 1]);
    auto back = integrated_distance(d, {0.5, 0, 0, 0}, {0, 0, 0, 0});
    EXPECT_NEAR(back.value / fwd.value, 1.0, 0.1);
}

TEST(ApproachExperiment, ModelTypeFourNormalAndTangential) {
    MetricDomain d(model(2));
    ApproachExperiment e;
    e.t = ApproachExperiment::default_t();
    auto r = approach_experiment(d, e);
    ASSERT_EQ(r.rows.size(), 11u);
    EXPECT_GE(r.normal.slope, -1.1);
    EXPECT_LE(r.normal.slope, -0.9);
    EXPECT_GE(r.tangential.slope, -0.30);
    EXPECT_LE(r.tangential.slope, -0.20);
    EXPECT_GT(r.hopf_constant, 0.0);
    EXPECT_LE(r.hopf_drift, 0.2);
}

TEST(ApproachExperiment, ModelTypeSixCone) {
    MetricDomain d(model(3));
    ApproachExperiment e;
    e.family = ApproachFamily::cone;
    e.aperture = 0.5;
    e.t = ApproachExperiment::default_t();
    auto r = approach_experiment(d, e);
    for (const auto& row : r.rows) {
        double nz = norm4(row.p);
        EXPECT_GT(-row.p[2], e.aperture * nz);
    }
    EXPECT_GE(r.tangential.slope, -0.22);
    EXPECT_LE(r.tangential.slope, -0.12);
    EXPECT_LE(r.hopf_drift, 0.2);
}

TEST(ApproachExperiment, HopfRatioStableOnModels) {
    for (int m = 1; m <= 3; ++m) {
        MetricDomain d(model(m));
        ApproachExperiment e;
        for (int j = 8; j <= 14; ++j) e.t.push_back(std::ldexp(1.0, -j));
        MetricOptions o;
        o.optimizer_restarts = 1;
        auto r = approach_experiment(d, e, o);
        EXPECT_GT(r.hopf_constant, 0.0);
        EXPECT_LE(r.hopf_drift, 0.2) << "model " << m;
    }
}

TEST(PeakLowerBound, ConstructionGivesOrderedInterval) {
    PeakOptions po;
    po.psh_points = 2000;
    po.psh_directions = 32;
    po.closure_points = 4000;
    auto lb = std::make_shared<PeakLowerBound>(
        prepare_peak_lower_bound({model(2), S::standard()}, RealStructure::standard(), po));
    EXPECT_GT(lb->N, 0.0);
    EXPECT_LT(lb->outer_max, 0.0);
    EXPECT_GT(lb->alpha, 0.0);
    EXPECT_LE(lb->alpha, 0.18);
    MetricOptions o;
    o.peak_lower = lb;
    MetricDomain d(model(2));
    double a2 = lb->alpha * lb->alpha;
    auto in = estimate_metric(d, {0, 0, -0.5 * a2, 0}, e2, o);
    EXPECT_EQ(in.lower_method, "peak-bound");
    EXPECT_TRUE(std::isfinite(in.log_lower));
    EXPECT_LE(in.lower, in.upper);
    auto out = estimate_metric(d, {0, 0, -0.01, 0}, e2, o);
    EXPECT_EQ(out.lower_method, "trivial-zero");
}

TEST(DecreasingProperty, IdentityGivesEqualIntervals) {
    MetricDomain d(unit_ball());
    auto rep = decreasing_property_check(Diffeomorphism<double>::identity(), d, d, {{{0.1, 0.2, 0.0, -0.3}, e1}});
    ASSERT_EQ(rep.rows.size(), 1u);
    EXPECT_EQ(rep.rows[0].source.upper, rep.rows[0].target.upper);
    EXPECT_TRUE(rep.all_hold);
}

TEST(DecreasingProperty, InclusionAndUnitaryMap) {
    MetricDomain big(unit_disc_cylinder());
    MetricDomain small = big.intersect(unit_ball());
    std::vector<MetricQuery> qs{{{0.2, 0.0, 0.1, 0.0}, e1}, {{0.0, 0.3, 0.0, 0.2}, e2}};
    EXPECT_TRUE(decreasing_property_check(Diffeomorphism<double>::identity(), small, big, qs).all_hold);
    // (z1, z2) -> (z2, z1) is a holomorphic automorphism of the ball.
    Mat4 swap{};
    swap[0][2] = swap[1][3] = swap[2][0] = swap[3][1] = 1.0;
    MetricDomain b(unit_ball());
    auto rep = decreasing_property_check(Diffeomorphism<double>::linear(swap), b, b, qs);
    EXPECT_TRUE(rep.all_hold);
    for (const auto& row : rep.rows) EXPECT_NEAR(row.source.upper / row.target.upper, 1.0, 0.02);
}

TEST(DecreasingProperty, ConjugationIsRejected) {
    Mat4 conj{};
    conj[0][0] = 1.0;
    conj[1][1] = -1.0;
    conj[2][2] = 1.0;
    conj[3][3] = 1.0;
    MetricDomain b(unit_ball());
    try {
        decreasing_property_check(Diffeomorphism<double>::linear(conj), b, b, {{{0.1, 0.1, 0.0, 0.0}, e1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotHolomorphicWitness);
    }
}
