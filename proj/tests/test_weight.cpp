#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "triple_lab/boundary.hpp"
#include "triple_lab/simplex.hpp"

using namespace triple_lab;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
    const std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << body;
    return path;
}

} // namespace

TEST(WeightEval, Examples) {
    EXPECT_DOUBLE_EQ(Weight::power(1)(0.5), 0.75);
    EXPECT_DOUBLE_EQ(Weight::constant(1)(0.3), 1.0);
    EXPECT_NEAR(Weight::expdecay(1)(0.5), std::exp(-2.0), 1e-16);
    EXPECT_THROW(Weight::power(1)(1.0), UsageError);
    EXPECT_THROW(Weight::power(1)(-0.1), UsageError);
}

TEST(WeightEval, LogAtGapMatchesDirectEvaluation) {
    for (const Weight& w : {Weight::power(0.5), Weight::power(2), Weight::expdecay(1), Weight::constant(3)}) {
        for (double r : {0.0, 0.1, 0.5, 0.9, 0.99}) {
            EXPECT_NEAR(w.log_at(r), std::log(w(r)), 1e-12) << w.descriptor() << " r=" << r;
        }
    }
    // far past the underflow point of the direct formula
    EXPECT_DOUBLE_EQ(Weight::expdecay(1).log_at_gap(1e-6), -1e6);
}

TEST(WeightParse, Descriptors) {
    EXPECT_EQ(Weight::parse("power:1.0").family(), WeightFamily::power);
    EXPECT_EQ(Weight::parse("expdecay:0.5").parameter(), 0.5);
    EXPECT_EQ(Weight::parse("constant:2").descriptor(), "constant:2");
    EXPECT_THROW(Weight::parse("power"), UsageError);
    EXPECT_THROW(Weight::parse("power:-1"), UsageError);
    EXPECT_THROW(Weight::parse("gauss:1"), UsageError);
    EXPECT_THROW(Weight::parse("power:1x"), UsageError);
    EXPECT_THROW(Weight::parse("table:/nonexistent/file.csv"), UsageError);
}

TEST(WeightTable, CsvAndInterpolation) {
    const std::string path = write_temp("tw_ok.csv", "r,v\n0,1\n0.5,0.5\n# note\n0.9,0.1\n");
    const Weight w = Weight::parse("table:" + path);
    EXPECT_EQ(w.knots().size(), 3u);
    EXPECT_DOUBLE_EQ(w(0.25), 0.75);
    EXPECT_DOUBLE_EQ(w(0.95), 0.1);
    EXPECT_TRUE(w.non_increasing());
    EXPECT_TRUE(w.positive_on_grid());
    EXPECT_THROW(Weight::table({{0.5, 1}, {0.4, 1}}), UsageError);
    EXPECT_THROW(Weight::table({{0.5, -1}}), UsageError);
    EXPECT_THROW(Weight::parse("table:" + write_temp("tw_bad.csv", "0,1\n0.5,zz\n")), UsageError);
}

TEST(ConditionI, Examples) {
    const ConditionIReport p = condition_I_check(Weight::power(2));
    EXPECT_TRUE(p.passed);
    ASSERT_EQ(p.entries.size(), 3u);
    EXPECT_NEAR(p.entries[2].minimum, std::pow(1.0 - 0.998001, 2), 1e-15);
    EXPECT_NEAR(p.entries[2].minimum, 3.996e-6, 1e-9);

    const ConditionIReport c = condition_I_check(Weight::constant(1));
    EXPECT_TRUE(c.passed);
    EXPECT_EQ(c.entries[0].minimum, 1.0);

    const ConditionIReport z = condition_I_check(Weight::table({{0.0, 1.0}, {0.3, 0.0}, {0.6, 1.0}}));
    EXPECT_FALSE(z.passed);
    EXPECT_DOUBLE_EQ(z.offending_radius, 0.3);
    EXPECT_FALSE(Weight::table({{0.0, 1.0}, {0.3, 0.0}}).positive_on_grid());
}

TEST(Simplex, SmallKnownOptimum) {
    // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
    const LpResult r = simplex_maximize({3, 5}, {1, 0, 0, 2, 3, 2}, {4, 12, 18});
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.x[0], 2.0, 1e-12);
    EXPECT_NEAR(r.x[1], 6.0, 1e-12);
    EXPECT_NEAR(r.objective, 36.0, 1e-12);
}

TEST(Simplex, UnboundedAndDegenerate) {
    EXPECT_EQ(simplex_maximize({1, 1}, {1, -1}, {1}).status, LpStatus::unbounded);
    // zero right-hand side: degenerate start, optimum 0
    const LpResult d = simplex_maximize({1, 1}, {1, 1, 1, -1}, {0, 0});
    ASSERT_EQ(d.status, LpStatus::optimal);
    EXPECT_NEAR(d.objective, 0.0, 1e-15);
    EXPECT_THROW(simplex_maximize({1}, {1, 2}, {1}), UsageError);
    EXPECT_THROW(simplex_maximize({1}, {1}, {-1}), UsageError);
}

TEST(Simplex, RandomProblemsAreFeasibleAndBeatVertices) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 5, m = 3 + trial % 7;
        std::vector<double> c(n), a(m * n), b(m);
        for (double& x : c) x = u(rng);
        for (double& x : a) x = u(rng) + 0.05;
        for (double& x : b) x = u(rng) + 0.1;
        const LpResult r = simplex_maximize(c, a, b);
        ASSERT_EQ(r.status, LpStatus::optimal);
        for (std::size_t i = 0; i < m; ++i) {
            double lhs = 0;
            for (std::size_t j = 0; j < n; ++j) lhs += a[i * n + j] * r.x[j];
            EXPECT_LE(lhs, b[i] * (1 + 1e-12));
        }
        // every single-coordinate point on the boundary is no better
        for (std::size_t j = 0; j < n; ++j) {
            double t = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) t = std::min(t, b[i] / a[i * n + j]);
            EXPECT_GE(r.objective, c[j] * t - 1e-12);
        }
    }
}

TEST(Moment, Examples) {
    const MomentResult m0 = moment(Weight::power(1), 0);
    EXPECT_NEAR(m0.value, 1.0, 1e-12);
    const MomentResult m1 = moment(Weight::power(1), 1);
    EXPECT_NEAR(m1.value, 2.0 / 3.0 / std::sqrt(3.0), 1e-8 * m1.value);
    EXPECT_NEAR(m1.argmax_r, 1.0 / std::sqrt(3.0), 1e-6);
    const MomentResult m2 = moment(Weight::power(1), 2);
    EXPECT_NEAR(m2.value, 0.25, 1e-8 * 0.25);
    EXPECT_NEAR(m2.argmax_r, std::sqrt(0.5), 1e-6);
}

TEST(Moment, PowerClosedFormProperty) {
    // sup (1-s^2)^a s^n at s^2 = n/(n+2a)
    for (double a : {0.5, 1.0, 2.0, 3.5}) {
        for (int n : {1, 3, 10, 100, 5000}) {
            const double s2 = n / (n + 2.0 * a);
            const double exact = a * std::log1p(-s2) + 0.5 * n * std::log(s2);
            EXPECT_NEAR(moment(Weight::power(a), n).log_value, exact, 1e-8) << a << " " << n;
        }
    }
    for (int n : {1, 10, 1000}) {
        // expdecay: sup over t of -b/t + n log(1-t); compare to a dense direct scan
        const Weight w = Weight::expdecay(1);
        double best = -1e300;
        for (int i = 1; i < 200000; ++i) {
            const double t = i / 200000.0;
            best = std::max(best, -1.0 / t + n * std::log1p(-t));
        }
        EXPECT_GE(moment(w, n).log_value, best - 1e-9);
    }
}

TEST(AssociatedMono, Examples) {
    EXPECT_NEAR(associated_upper_mono(Weight::constant(1), 0.7), 1.0, 1e-12);
    EXPECT_NEAR(associated_upper_mono(Weight::power(1), 0.5), 2.0 / 3.0 / std::sqrt(3.0) / 0.5, 1e-8);
    EXPECT_NEAR(associated_upper_mono(Weight::power(1), 1e-6), 1.0, 1e-9);
    EXPECT_THROW(associated_upper_mono(Weight::power(1), 1.0), UsageError);
}

TEST(AssociatedLp, Examples) {
    const LpEstimate p1 = associated_upper_lp(Weight::power(1), 0.5);
    EXPECT_NEAR(p1.value, 0.75, 0.0075);
    const LpEstimate c1 = associated_upper_lp(Weight::constant(1), 0.4);
    EXPECT_NEAR(c1.value, 1.0, 1e-9);
    const LpEstimate p2 = associated_upper_lp(Weight::power(2), 0.5);
    EXPECT_NEAR(p2.value, 0.5625, 0.005625);
    LpOptions big;
    big.degree = 257;
    EXPECT_THROW(associated_upper_lp(Weight::power(1), 0.5, big), UsageError);
}

TEST(AssociatedLp, CertificateAndOrdering) {
    for (double a : {0.5, 1.0, 2.0}) {
        const Weight w = Weight::power(a);
        for (double r : {0.3, 0.5, 0.7, 0.9}) {
            const LpEstimate lp = associated_upper_lp(w, r);
            EXPECT_LE(lp.validated_norm, 1.0 + 1e-9);
            EXPECT_NEAR(lp.value, w(r), 0.05 * w(r)) << "calibration a=" << a << " r=" << r;
            EXPECT_LE(lp.value, associated_upper_mono(w, r, 128) + 1e-9);
            EXPECT_GE(lp.value, w(r) * (1 - 1e-9));
            // direct re-evaluation of the returned polynomial on a fresh grid
            double sup = 0.0;
            for (int j = 0; j < 3001; ++j) {
                const double s = j / 3001.0;
                double p = 0.0;
                for (std::size_t n = lp.coefficients.size(); n-- > 0;) p = p * s + lp.coefficients[n];
                sup = std::max(sup, w(s) * p);
            }
            EXPECT_LE(sup, 1.0 + 1e-6);
            double pr = 0.0;
            for (std::size_t n = lp.coefficients.size(); n-- > 0;) pr = pr * r + lp.coefficients[n];
            EXPECT_NEAR(1.0 / pr, lp.value, 1e-9 * lp.value);
        }
    }
}

TEST(AssociatedEstimate, ChosenDominatesWeightAndDecreases) {
    for (const Weight& w : {Weight::power(0.5), Weight::power(1), Weight::expdecay(1), Weight::constant(2)}) {
        const AssociatedWeightEstimate e = associated_estimate(w, 12);
        for (std::size_t i = 0; i < e.radii.size(); ++i) {
            EXPECT_GE(e.log_chosen[i], w.log_at_gap(e.gaps[i]) - 1e-12) << w.descriptor();
            if (i > 0) {
                EXPECT_LE(e.log_chosen[i], e.log_chosen[i - 1]);
            }
            if (std::isfinite(e.log_upper_lp[i])) {
                EXPECT_LE(std::exp(e.log_upper_lp[i]), associated_upper_mono(w, e.radii[i], 128) + 1e-9);
            }
        }
        EXPECT_THROW(e.value_at(1.0 - 1e-9), UsageError);
    }
}

TEST(BoundaryL, Examples) {
    const BoundaryFunction p = boundary_l(Weight::power(1), BoundarySource::associated_estimate);
    ASSERT_EQ(p.s.size(), 20u);
    EXPECT_EQ(p.s[1], 0.25);
    EXPECT_NEAR(p.l[1], 0.4375, 0.4375 * 1e-3);
    for (std::size_t k = 1; k < p.s.size(); ++k) {
        EXPECT_NEAR(p.log_l[k], std::log(p.s[k] * (2 - p.s[k])), 1e-3);
        EXPECT_LE(p.l[k], p.l[k - 1]);
    }
    const BoundaryFunction c = boundary_l(Weight::constant(1), BoundarySource::associated_estimate);
    for (double v : c.l) EXPECT_DOUBLE_EQ(v, 1.0);
    const BoundaryFunction e = boundary_l(Weight::expdecay(1), BoundarySource::raw_weight);
    EXPECT_EQ(to_string(e.source), "raw-weight proxy");
    EXPECT_NEAR(e.l[1], std::exp(-4.0), 1e-18);
    EXPECT_THROW(boundary_l(Weight::power(1), BoundarySource::raw_weight, {0.75}), UsageError);
}

TEST(Doubling, PowerConstantExpdecay) {
    for (double a : {0.5, 1.0, 2.0}) {
        const DoublingReport d = doubling_check(boundary_l(Weight::power(a), BoundarySource::associated_estimate));
        EXPECT_EQ(d.verdict, DoublingVerdict::bounded) << a;
        EXPECT_NEAR(d.m_estimate, std::exp2(a), 0.05 * std::exp2(a)) << a;
    }
    const DoublingReport c = doubling_check(boundary_l(Weight::constant(1), BoundarySource::associated_estimate));
    EXPECT_EQ(c.verdict, DoublingVerdict::bounded);
    EXPECT_DOUBLE_EQ(c.m_estimate, 1.0);
    for (double b : {0.5, 1.0}) {
        for (BoundarySource src : {BoundarySource::associated_estimate, BoundarySource::raw_weight}) {
            const DoublingReport d = doubling_check(boundary_l(Weight::expdecay(b), src));
            EXPECT_EQ(d.verdict, DoublingVerdict::diverging) << b;
        }
    }
    // exact ratio for the raw expdecay profile: l(s)/l(s/2) = e^{b/s}
    const DoublingReport raw = doubling_check(boundary_l(Weight::expdecay(1), BoundarySource::raw_weight));
    EXPECT_NEAR(raw.log_ratios[2], 8.0, 1e-12);
}

TEST(Doubling, TooFewPointsAndUserSource) {
    EXPECT_THROW(doubling_check(boundary_l_user({0.5, 0.25, 0.125, 0.0625}, {1, 1, 1, 1})), UsageError);
    const BoundaryFunction u = boundary_l_user(dyadic_s_grid(8), std::vector<double>(8, 2.0));
    const DoublingReport d = doubling_check(u);
    EXPECT_EQ(d.verdict, DoublingVerdict::bounded);
    EXPECT_EQ(d.source, BoundarySource::user_supplied);
    // alternating ratios neither settle nor grow
    std::vector<double> vals;
    double v = 1.0;
    for (int k = 0; k < 12; ++k) {
        vals.push_back(v);
        v /= (k % 2 ? 2.0 : 8.0);
    }
    EXPECT_EQ(doubling_check(boundary_l_user(dyadic_s_grid(12), vals)).verdict, DoublingVerdict::inconclusive);
}

TEST(Domination, Examples) {
    const DominationReport same = weight_domination(Weight::power(1), Weight::power(1));
    EXPECT_TRUE(same.hypothesis_holds);
    EXPECT_DOUBLE_EQ(same.k, 1.0);
    const DominationReport fail = weight_domination(Weight::power(2), Weight::power(1));
    EXPECT_FALSE(fail.hypothesis_holds);
    EXPECT_EQ(fail.k, 0.0);
    EXPECT_GT(fail.witness_r, 1.0 - 1e-11);
    const DominationReport up = weight_domination(Weight::power(1), Weight::power(2));
    EXPECT_TRUE(up.hypothesis_holds);
    EXPECT_DOUBLE_EQ(up.k, 1.0);
    EXPECT_EQ(up.witness_r, 0.0);
    EXPECT_FALSE(weight_domination(Weight::table({{0.0, 1.0}, {0.5, 2.0}}), Weight::power(1)).vz_non_increasing);
}
