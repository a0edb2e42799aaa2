#include <gtest/gtest.h>

#include <cmath>

#include "ladder/increments.hpp"
#include "ladder/ladder_exact.hpp"
#include "ladder/monte_carlo.hpp"

using namespace ladder;

TEST(EstimateTail, ZeroSteps) {
    auto e = estimate_tail(make_symmetric_pm1(), 0.0, 0, 1000, 1);
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(EstimateTail, PlusMinusOneThreeSteps) {
    auto e = estimate_tail(make_symmetric_pm1(), 0.0, 3, 1000000, 2024);
    EXPECT_NEAR(e.value, 0.375, 4 * e.std_error);
    EXPECT_NEAR(e.std_error, std::sqrt(0.375 * 0.625 / 1e6), 1e-5);
    EXPECT_EQ(e.paths, 1000000);
    EXPECT_EQ(e.seed, 2024u);
    EXPECT_EQ(e.tilt, 0.0);
}

TEST(EstimateTail, GaussianAgainstDiscretizedDp) {
    const double span = 0.01;
    double dp = survival_dp(discretize_gaussian(span), 0.0, 100).probs.back();
    auto e = estimate_tail(make_gaussian_unit(), 0.0, 100, 1000000, 5);
    // A grid of span h moves P(tau > 100) by O(h / sqrt(2 pi)).
    double bias = span / std::sqrt(2.0 * M_PI);
    EXPECT_NEAR(e.value, dp, 4 * e.std_error + bias);
}

TEST(EstimateMoment, PBiasedMeanIsOneOverA) {
    for (double a : {0.2, 0.1, 0.05}) {
        auto e = estimate_moment(make_pbiased(a), a, 1.0, 200000, 10000000, 3);
        EXPECT_NEAR(e.value, 1.0 / a, 4 * e.std_error) << a;
        EXPECT_TRUE(e.warning.empty());
        EXPECT_EQ(e.censored_fraction, 0.0);
    }
}

TEST(EstimateMoment, ZeroOrder) {
    auto e = estimate_moment(make_pbiased(0.1), 0.1, 0.0, 1000, 100, 3);
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
}

TEST(EstimateMoment, CensoringWarning) {
    auto e = estimate_moment(make_pbiased(0.01), 0.01, 1.0, 10000, 10, 3);
    EXPECT_GT(e.censored_fraction, 0.01);
    EXPECT_FALSE(e.warning.empty());
    EXPECT_EQ(e.cap, 10);
}

TEST(Tilted, OverlapsPlainEstimate) {
    const double a = 0.2;
    auto m = make_pbiased(a);
    auto plain = estimate_tail(m, a, 100, 1000000, 8);
    auto tilted = tilted_estimate_tail(m, a, 100, 200000, 9);
    EXPECT_GT(tilted.tilt, 0.0);
    EXPECT_LT(std::fabs(plain.value - tilted.value), 3 * (plain.std_error + tilted.std_error));
}

TEST(Tilted, MatchesExactDeepInTail) {
    const double a = 0.2;
    auto m = make_pbiased(a);
    double exact = survival_dp(m, a, 500).probs.back();
    auto tilted = tilted_estimate_tail(m, a, 500, 200000, 10);
    EXPECT_NEAR(tilted.value, exact, 4 * tilted.std_error);
    EXPECT_LT(tilted.std_error, 0.1 * exact);
}

TEST(Tilted, BeatsPlainStandardError) {
    // n a^2 = 80. Plain MC sees no hits here, so its stderr is taken from the
    // exact probability.
    const double a = 0.2;
    const std::int64_t n = 2000, paths = 100000;
    auto m = make_pbiased(a);
    double p = survival_dp(m, a, n).probs.back();
    double plain_se = std::sqrt(p * (1 - p) / static_cast<double>(paths));
    auto tilted = tilted_estimate_tail(m, a, n, paths, 12);
    EXPECT_LE(tilted.std_error, plain_se);
}

TEST(Tilted, ZeroDriftIsPlain) {
    auto m = make_symmetric_pm1();
    auto plain = estimate_tail(m, 0.0, 20, 50000, 4);
    auto tilted = tilted_estimate_tail(m, 0.0, 20, 50000, 4);
    EXPECT_EQ(tilted.tilt, 0.0);
    EXPECT_EQ(tilted.value, plain.value);
    EXPECT_EQ(tilted.std_error, plain.std_error);
}

TEST(Tilted, FallsBackWithoutMgf) {
    auto m = make_pareto(3.5, 0.1, 500);
    auto t = tilted_estimate_tail(m, 0.2, 20, 20000, 4);
    EXPECT_EQ(t.tilt, 0.0);
    EXPECT_FALSE(t.warning.empty());
    auto plain = estimate_tail(m, 0.2, 20, 20000, 4);
    EXPECT_EQ(t.value, plain.value);
}

TEST(Determinism, SameSeedSameBits) {
    auto m = make_pbiased(0.1);
    auto a = estimate_tail(m, 0.1, 50, 30000, 77);
    auto b = estimate_tail(m, 0.1, 50, 30000, 77);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
    auto c = estimate_tail(m, 0.1, 50, 30000, 78);
    EXPECT_NE(a.value, c.value);
}

TEST(Determinism, ThreadCountDoesNotMatter) {
    auto g = make_gaussian_unit();
    auto one = estimate_tail(g, 0.05, 200, 20000, 5, 1);
    auto four = estimate_tail(g, 0.05, 200, 20000, 5, 4);
    EXPECT_EQ(one.value, four.value);
    EXPECT_EQ(one.std_error, four.std_error);
    auto m1 = estimate_moment(g, 0.1, 0.5, 20000, 100000, 6, 1);
    auto m4 = estimate_moment(g, 0.1, 0.5, 20000, 100000, 6, 4);
    EXPECT_EQ(m1.value, m4.value);
    auto t1 = tilted_estimate_tail(make_pbiased(0.2), 0.2, 300, 20000, 7, 1);
    auto t4 = tilted_estimate_tail(make_pbiased(0.2), 0.2, 300, 20000, 7, 4);
    EXPECT_EQ(t1.value, t4.value);
}

TEST(Coverage, NominalIntervalsCoverTruth) {
    auto m = make_symmetric_pm1();
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto e = estimate_tail(m, 0.0, 3, 10000, seed);
        covered += std::fabs(e.value - 0.375) <= 1.959964 * e.std_error;
    }
    EXPECT_GE(covered, 90);
    EXPECT_LE(covered, 99);
}
