#include <gtest/gtest.h>

#include "koenigs/catalog.hpp"
#include "koenigs/engine.hpp"
#include "oracles.hpp"

using namespace koenigs;

TEST(Iterate, ZeroStepsIsIdentity) {
    const Jet j = iterate(lens_map(0.5).map, cplx{0.3, 0.1}, 0);
    EXPECT_EQ(j.value, cplx(0.3, 0.1));
    EXPECT_EQ(j.derivative, cplx(1.0, 0.0));
    EXPECT_THROW(iterate(linear_map(0.5), cplx{0.1, 0.0}, -1), RangeError);
}

TEST(Iterate, MoebiusClosedForm) {
    const MapExpr f = moebius_model(0.5).map;
    for (int k : {1, 3, 7}) {
        for (cplx z : oracle::circle(0.8, 16)) {
            EXPECT_NEAR(std::abs(iterate(f, z, k).value - oracle::moebius_iterate(0.5, k, z)), 0.0, 1e-14);
        }
    }
}

TEST(Koenigs, LinearMapConvergesImmediately) {
    const KoenigsApproximation a = koenigs_approx(linear_map(0.5));
    EXPECT_EQ(a.depth, 1);
    EXPECT_EQ(a.cauchy_gap, 0.0);
    const Jet s = koenigs_eval(a, cplx{0.3, -0.2});
    EXPECT_NEAR(std::abs(s.value - cplx(0.3, -0.2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.derivative - 1.0), 0.0, 1e-15);
}

TEST(Koenigs, NormalizedAtOrigin) {
    for (const MapExpr& f : {linear_map(0.5), moebius_model(0.5).map, lens_map(0.5).map}) {
        const KoenigsApproximation a = koenigs_approx(f);
        const Jet s = koenigs_eval(a, cplx{0.0, 0.0});
        EXPECT_LE(std::abs(s.value), 1e-10) << f.name();
        EXPECT_LE(std::abs(s.derivative - 1.0), 1e-10) << f.name();
        EXPECT_LE(a.cauchy_gap, 1e-10);
        EXPECT_GT(std::abs(a.lambda), 0.0);
        EXPECT_LT(std::abs(a.lambda), 1.0);
    }
}

TEST(Koenigs, LensMatchesAtanh) {
    const KoenigsApproximation a = koenigs_approx(lens_map(0.5).map);
    for (cplx z : DiskGrid::filled(0.7).points()) {
        const Jet s = koenigs_eval(a, z);
        EXPECT_NEAR(std::abs(s.value - oracle::lens_koenigs(z)), 0.0, 1e-8) << z;
        EXPECT_NEAR(std::abs(s.derivative - oracle::lens_koenigs_prime(z)), 0.0, 1e-8) << z;
    }
}

TEST(Koenigs, MoebiusMatchesClosedForm) {
    for (double lambda : {0.3, 0.5, 0.7}) {
        const KoenigsApproximation a = koenigs_approx(moebius_model(lambda).map);
        double worst = 0.0;
        for (cplx z : DiskGrid::filled(0.8).points()) {
            worst = std::max(worst, std::abs(koenigs_eval(a, z).value - oracle::moebius_koenigs(z)));
        }
        EXPECT_LE(worst, 1e-8) << lambda;
    }
}

TEST(Koenigs, NonConvergenceCarriesFinalGap) {
    try {
        koenigs_approx(moebius_model(0.9).map, 1e-10, 5, 0.7);
        FAIL() << "expected non-convergence";
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.depth(), 5);
        EXPECT_GT(e.final_gap(), 1e-10);
    }
}

TEST(Koenigs, RejectsInadmissibleMapsAndBadOptions) {
    EXPECT_THROW(koenigs_approx(parse_map("z^2")), RangeError);
    EXPECT_THROW(koenigs_approx(parse_map("z")), RangeError);
    EXPECT_THROW(koenigs_approx(linear_map(0.5), -1.0, 10, 0.7), RangeError);
    EXPECT_THROW(koenigs_approx(linear_map(0.5), 1e-10, 10, 1.0), RangeError);
}

TEST(Koenigs, GapSequenceHasRequestedLength) {
    const auto gaps = koenigs_gap_sequence(moebius_model(0.5).map, 12);
    EXPECT_EQ(gaps.size(), 13u);
}

TEST(Residual, SchroderResidualSmallOnCatalog) {
    for (const MapExpr& f : {linear_map(0.5), moebius_model(0.5).map, lens_map(0.5).map}) {
        const ResidualReport r = schroder_residual(koenigs_approx(f), DiskGrid::filled(0.7));
        EXPECT_LE(r.sup, 1e-8) << f.name();
        EXPECT_EQ(r.coverage, 1.0);
    }
    const ResidualReport lin = schroder_residual(koenigs_approx(linear_map(0.5)), DiskGrid::filled(0.7));
    EXPECT_LE(lin.sup, 1e-12);
}

TEST(Weighted, UnitWeightGivesOneExactly) {
    const WeightedKoenigs wk = weighted_principal(lens_map(0.5).map, parse_map("1"));
    for (cplx z : DiskGrid::filled(0.9).points()) {
        const Jet v = weighted_eval(wk, z);
        EXPECT_EQ(v.value, cplx(1.0, 0.0));
        EXPECT_EQ(v.derivative, cplx(0.0, 0.0));
    }
}

TEST(Weighted, AffineWeightOnLinearMapMatchesProduct) {
    const WeightedKoenigs wk = weighted_principal(linear_map(0.5), parse_map("1 + z/2"));
    EXPECT_EQ(wk.eigenvalue, cplx(1.0, 0.0));
    for (cplx z : DiskGrid::filled(0.7).points()) {
        EXPECT_NEAR(std::abs(weighted_eval(wk, z).value - oracle::affine_weight_product(0.5, 0.5, z)), 0.0, 1e-9);
    }
    EXPECT_NEAR(std::abs(weighted_eval(wk, cplx{0.0, 0.0}).value - 1.0), 0.0, 1e-10);
}

TEST(Weighted, ResidualSmallForAffineWeight) {
    for (const MapExpr& f : {linear_map(0.5), lens_map(0.5).map}) {
        const WeightedKoenigs wk = weighted_principal(f, parse_map("1 + z/2"));
        EXPECT_LE(weighted_residual(wk, DiskGrid::filled(0.7)).sup, 1e-8) << f.name();
    }
}

TEST(Weighted, RejectsWeightVanishingAtOrigin) {
    EXPECT_THROW(weighted_principal(linear_map(0.5), parse_map("z")), RangeError);
}

TEST(Eigenfunction, EigenvalueAndRelation) {
    const MapExpr f = lens_map(0.5).map;
    const MapExpr u = parse_map("1 + z/2");
    const KoenigsApproximation a = koenigs_approx(f);
    const WeightedKoenigs wk = weighted_principal(f, u);
    for (int n : {0, 1, 3}) {
        for (cplx z : oracle::circle(0.6, 24)) {
            const EigenJet e = eigenfunction_eval(a, &wk, n, z);
            EXPECT_NEAR(std::abs(e.eigenvalue - std::pow(0.5, n)), 0.0, 1e-15);
            const cplx lhs = u(z) * eigenfunction_eval(a, &wk, n, f(z)).jet.value;
            EXPECT_NEAR(std::abs(lhs - e.eigenvalue * e.jet.value), 0.0, 1e-8);
        }
    }
    const WeightedKoenigs other = weighted_principal(linear_map(0.5), u);
    EXPECT_THROW(eigenfunction_eval(a, &other, 1, cplx{0.1, 0.0}), RangeError);
}
