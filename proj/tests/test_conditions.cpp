#include <gtest/gtest.h>

#include "koenigs/catalog.hpp"
#include "koenigs/conditions.hpp"
#include "oracles.hpp"

using namespace koenigs;

namespace {

const MapExpr& unit() {
    static const MapExpr u = parse_map("1");
    return u;
}

double margin_at(const ConditionReport& r, cplx z) {
    for (const auto& s : r.samples) {
        if (s.z == z && s.check) return s.check->margin();
    }
    ADD_FAILURE() << "point not sampled";
    return 0.0;
}

}  // namespace

TEST(ConditionA, LinearHoldsWithZeroMarginAtOrigin) {
    const ConditionReport r = check_condition_A(linear_map(0.5), 1.0, 0);
    EXPECT_EQ(r.verdict, Verdict::HoldsOnGrid);
    EXPECT_NEAR(*r.worst_margin, 0.0, 1e-15);
    EXPECT_EQ(margin_at(r, cplx{0.0, 0.0}), 0.0);
    EXPECT_EQ(r.coverage, 1.0);
}

TEST(ConditionA, LensHoldsWithSupTOnRealAxis) {
    const ConditionReport r = check_condition_A(lens_map(0.5).map, 1.0, 0);
    EXPECT_EQ(r.verdict, Verdict::HoldsOnGrid);
    for (double x : {0.0, 0.5, 0.75, 0.875}) {
        EXPECT_NEAR(margin_at(r, cplx{x, 0.0}), 0.0, 1e-12);
    }
}

TEST(ConditionA, MonotoneInShift) {
    const MapExpr f = linear_map(0.5);
    ASSERT_EQ(check_condition_A(f, 1.0, 0).verdict, Verdict::HoldsOnGrid);
    EXPECT_EQ(check_condition_A(f, 1.0, 1).verdict, Verdict::HoldsOnGrid);
    // The shifted condition at z is the plain one at phi(z).
    for (cplx z : oracle::circle(0.7, 12)) {
        EXPECT_DOUBLE_EQ(condition_A_point(f, 1.0, 1, z).lhs, condition_A_point(f, 1.0, 0, f(z)).lhs);
    }
}

TEST(ConditionA, ViolationWhenMapGrowsHyperbolically) {
    // z -> z (0.5 + 0.4 z) is a self-map whose hyperbolic derivative exceeds 0.5 somewhere.
    const ConditionReport r = check_condition_A(parse_map("z*(0.5 + 0.4*z)"), 1.0, 0);
    EXPECT_EQ(r.verdict, Verdict::Violated);
    EXPECT_GT(*r.worst_margin, kPointTolerance);
}

TEST(ConditionA, RejectsBadParameters) {
    EXPECT_THROW(check_condition_A(linear_map(0.5), 0.0, 0), RangeError);
    EXPECT_THROW(check_condition_A(linear_map(0.5), 1.0, -1), RangeError);
    EXPECT_THROW(check_condition_A(parse_map("z^2"), 1.0, 0), RangeError);
}

TEST(LogBound, MarginZeroAtOrigin) {
    for (const MapExpr& f : {linear_map(0.5), lens_map(0.5).map, moebius_model(0.3).map}) {
        const PointCheck c = eq12_point(f, cplx{0.0, 0.0});
        EXPECT_DOUBLE_EQ(c.lhs, c.rhs) << f.name();
    }
}

TEST(LogBound, LinearViolatedAtHalfByHand) {
    const double by_hand = 0.5 * (0.75 / 0.9375) * (std::log(4.0) / std::log(8.0 / 3.0));
    EXPECT_NEAR(by_hand, 0.565, 5e-4);
    EXPECT_NEAR(eq12_point(linear_map(0.5), cplx{0.5, 0.0}).lhs, by_hand, 1e-15);
    const ConditionReport r = check_eq12(linear_map(0.5));
    EXPECT_EQ(r.verdict, Verdict::Violated);
    // Worst point of the standard grid; the continuous maximum lies near r = 0.38.
    EXPECT_EQ(std::abs(r.witness), 0.5);
    EXPECT_NEAR(*r.worst_margin, by_hand - 0.5, 1e-12);
}

TEST(LogBound, LensVerdictStableUnderDenserGrid) {
    const MapExpr f = lens_map(0.5).map;
    const ConditionReport coarse = check_eq12(f);
    const ConditionReport dense = check_eq12(f, DiskGrid::ladder(10, 256, 32768));
    EXPECT_EQ(coarse.verdict, dense.verdict);
    EXPECT_EQ(coarse.verdict, Verdict::Violated);
}

TEST(LogBound, OracleAgreesOnRealAxis) {
    const MapExpr f = linear_map(0.3);
    for (double x : {0.1, 0.4, 0.9, 0.999}) {
        EXPECT_NEAR(eq12_point(f, cplx{x, 0.0}).lhs, oracle::eq12_linear_lhs(0.3, x), 1e-14);
    }
}

TEST(Boundedness, LinearAtAlphaOne) {
    const ConditionReport r = check_zh21(linear_map(0.5), std::nullopt, 1.0);
    ASSERT_EQ(r.quantities.size(), 2u);
    EXPECT_EQ(r.quantities[0].id, "2a");
    EXPECT_EQ(r.quantities[0].estimate.value, 0.0);
    EXPECT_EQ(r.quantities[1].id, "2b");
    EXPECT_NEAR(r.quantities[1].estimate.value, 0.5, 1e-12);
    EXPECT_EQ(r.label, "bounded-evidence");
    EXPECT_FALSE(r.worst_margin);
}

TEST(Boundedness, LensAtAlphaOne) {
    const ConditionReport r = check_zh21(lens_map(0.5).map, unit(), 1.0);
    EXPECT_NEAR(r.quantities[1].estimate.value, 0.5, 1e-9);
    EXPECT_EQ(r.label, "bounded-evidence");
}

TEST(Boundedness, AffineWeightSmallAlpha) {
    const ConditionReport r = check_zh21(linear_map(0.5), parse_map("1 + z/2"), 0.5);
    ASSERT_EQ(r.quantities.size(), 2u);
    EXPECT_EQ(r.label, "bounded-evidence");
}

TEST(Boundedness, LargeAlphaUsesThirdCase) {
    const ConditionReport r = check_zh21(moebius_model(0.5).map, parse_map("1 + z/2"), 2.0);
    ASSERT_EQ(r.quantities.size(), 2u);
    EXPECT_EQ(r.quantities[0].id, "3a");
    EXPECT_EQ(r.quantities[1].id, "3b");
}

TEST(Boundedness, UnboundedWeightIsDetected) {
    const ConditionReport r = check_zh21(linear_map(0.5), parse_map("1/(1 - z)"), 1.0);
    EXPECT_EQ(r.label, "unbounded-evidence");
}

TEST(Compactness, LinearIsVacuous) {
    for (const auto& c : check_compactness(linear_map(0.5), std::nullopt, 1.0)) {
        EXPECT_EQ(c.trend, Trend::Vacuous);
        EXPECT_TRUE(c.samples.empty());
    }
}

TEST(Compactness, LensBoundedAwayAtT) {
    const auto reps = check_compactness(lens_map(0.5).map, std::nullopt, 1.0);
    ASSERT_EQ(reps.size(), 2u);
    EXPECT_EQ(reps[0].trend, Trend::TendsToZero);
    EXPECT_EQ(reps[1].trend, Trend::BoundedAway);
    EXPECT_NEAR(reps[1].plateau, 0.5, 0.01);
    for (std::size_t i = 1; i < reps[1].samples.size(); ++i) {
        EXPECT_LE(reps[1].samples[i - 1].first, reps[1].samples[i].first);
    }
}

TEST(Compactness, MoebiusBoundedAwayWithClosedFormLimit) {
    // On the real axis the quantity is (1 + r)/2, so the tail maxima approach 1.
    const auto reps = check_compactness(moebius_model(0.5).map, std::nullopt, 1.0);
    EXPECT_EQ(reps[1].trend, Trend::BoundedAway);
    const double r = 1.0 - std::ldexp(1.0, -20);
    EXPECT_NEAR(reps[1].plateau, (1.0 + r) / 2.0, 1e-9);
}

TEST(Compactness, SmallAlphaHasSingleQuantity) {
    const auto reps = check_compactness(lens_map(0.5).map, std::nullopt, 0.5);
    ASSERT_EQ(reps.size(), 1u);
    EXPECT_EQ(reps[0].quantity, "1");
    EXPECT_THROW(check_compactness(lens_map(0.5).map, std::nullopt, 1.0, {1e-3, 1e-1}), RangeError);
}

TEST(GrowthOnCircles, LinearClosedForms) {
    const std::vector<double> rs = {0.9, 0.99, 0.999, 0.9999};
    const Th23Report t = check_th23(linear_map(0.5), unit(), 0.5, rs);
    ASSERT_EQ(t.samples.size(), 4u);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        EXPECT_NEAR(t.samples[i].m_r, 0.5 * rs[i], 1e-15);
        EXPECT_NEAR(t.samples[i].a_r, 0.5, 1e-15);
        EXPECT_NEAR(t.samples[i].growth, std::log(1.0 - rs[i]) * std::log(0.5 * rs[i]), 1e-12);
    }
    EXPECT_TRUE(t.condition_i_diverges);
    EXPECT_EQ(t.report.verdict, Verdict::HoldsOnGrid);
}

TEST(GrowthOnCircles, EpsilonConstraint) {
    // log 0.5 = -0.69, so epsilon = 2 breaks epsilon log ||phi|| > -1.
    EXPECT_THROW(check_th23(linear_map(0.5), unit(), 2.0, {0.9, 0.99}), RangeError);
    EXPECT_THROW(check_th23(linear_map(0.5), unit(), 0.5, {0.99, 0.9}), RangeError);
}

TEST(GrowthOnCircles, DivergenceProxy) {
    EXPECT_TRUE(diverges_to_infinity({1.0, 5.0, 11.0}));
    EXPECT_TRUE(diverges_to_infinity({1.84, 3.24, 4.79, 6.38}));
    EXPECT_FALSE(diverges_to_infinity({1.0, 1.5, 1.6, 1.61}));
    EXPECT_FALSE(diverges_to_infinity({1.0, 2.0, 1.5}));
}

TEST(IterateSup, LinearFoundAtFirstIterate) {
    const IterateSupReport it = check_iterate_supnorm(linear_map(0.5), 10);
    ASSERT_TRUE(it.first_k);
    EXPECT_EQ(*it.first_k, 1);
    EXPECT_NEAR(it.sups[0], 0.5 * 0.999, 1e-15);
}

TEST(IterateSup, MatchesClosedFormIterates) {
    const double r = 0.999;
    const auto pts = oracle::circle(r, 512);
    const IterateSupReport lens = check_iterate_supnorm(lens_map(0.5).map, 4, r);
    const IterateSupReport moeb = check_iterate_supnorm(moebius_model(0.5).map, 4, r);
    for (int k = 1; k <= 4; ++k) {
        double sl = 0.0, sm = 0.0;
        for (cplx z : pts) {
            sl = std::max(sl, std::abs(oracle::lens(std::pow(0.5, k), z)));
            sm = std::max(sm, std::abs(oracle::moebius_iterate(0.5, k, z)));
        }
        EXPECT_NEAR(lens.sups[k - 1], sl, 1e-9) << k;
        EXPECT_NEAR(moeb.sups[k - 1], sm, 1e-12) << k;
    }
}

TEST(IterateSup, BoundaryContactNeedsProbeCloseToCircle) {
    // phi_k(r) = r / (2^k - (2^k - 1) r) stays above 1 - 1e-3 for k <= 5 at r = 1 - 1e-7.
    const IterateSupReport it = check_iterate_supnorm(moebius_model(0.5).map, 5, 1.0 - 1e-7);
    EXPECT_FALSE(it.first_k);
    EXPECT_EQ(it.report.label, "not found");
}

TEST(WeightedBeta, UnitWeightLinearHolds) {
    const ConditionReport r = check_weighted_beta(linear_map(0.5), unit(), 1.0, BetaVariant::Plain);
    EXPECT_EQ(r.verdict, Verdict::HoldsOnGrid);
    EXPECT_EQ(margin_at(r, cplx{0.0, 0.0}), 0.0);
}

TEST(WeightedBeta, AffineWeightViolatedByHand) {
    const MapExpr u = parse_map("1 + z/2");
    const PointCheck c = weighted_beta_point(linear_map(0.5), u, 1.0, BetaVariant::Plain, cplx{0.2, 0.0});
    EXPECT_NEAR(c.lhs, 1.1 * 0.96 / 0.99, 1e-15);
    EXPECT_NEAR(c.lhs, 1.067, 1e-3);
    const ConditionReport r = check_weighted_beta(linear_map(0.5), u, 1.0, BetaVariant::Plain);
    EXPECT_EQ(r.verdict, Verdict::Violated);
}

TEST(WeightedBeta, UnitWeightMarginZeroAtOriginForAnyMap) {
    for (double beta : {0.5, 1.0, 3.0}) {
        for (const MapExpr& f : {lens_map(0.3).map, moebius_model(0.6).map}) {
            EXPECT_EQ(weighted_beta_point(f, unit(), beta, BetaVariant::Plain, cplx{0.0, 0.0}).margin(), 0.0);
        }
    }
}

TEST(WeightedBeta, NonIntegerBetaIsNotedForLogVariant) {
    const ConditionReport r = check_weighted_beta(linear_map(0.5), unit(), 1.5, BetaVariant::LogWeighted);
    EXPECT_EQ(r.notes.size(), 2u);
    EXPECT_THROW(check_weighted_beta(linear_map(0.5), parse_map("z"), 1.0, BetaVariant::Plain), RangeError);
}

TEST(ReportIntegrity, ViolationsReproduceAtWitness) {
    const ConditionReport e = check_eq12(linear_map(0.5));
    ASSERT_EQ(e.verdict, Verdict::Violated);
    EXPECT_EQ(eq12_point(linear_map(0.5), e.witness).margin(), *e.worst_margin);

    const MapExpr u = parse_map("1 + z/2");
    const ConditionReport w = check_weighted_beta(linear_map(0.5), u, 1.0, BetaVariant::Plain);
    ASSERT_EQ(w.verdict, Verdict::Violated);
    EXPECT_EQ(weighted_beta_point(linear_map(0.5), u, 1.0, BetaVariant::Plain, w.witness).margin(), *w.worst_margin);

    const MapExpr g = parse_map("z*(0.5 + 0.4*z)");
    const ConditionReport a = check_condition_A(g, 1.0, 0);
    ASSERT_EQ(a.verdict, Verdict::Violated);
    EXPECT_EQ(condition_A_point(g, 1.0, 0, a.witness).margin(), *a.worst_margin);
}
