#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "ladder/error.hpp"
#include "ladder/rng.hpp"
#include "ladder/special.hpp"
#include "ladder/stable.hpp"

using namespace ladder;
using std::numbers::pi;

namespace {

// Shallow depth: on the light side of a skewed law panels hold ~1e-30 of mass
// and a relative tolerance would refine them forever.
double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 4, 1e-11);
}

// Density mass on [a, b] by panels of width 0.5.
double density_mass(const StableParams& p, double a, double b) {
    double s = 0.0;
    for (double x = a; x < b; x += 0.5) s += integrate([&](double t) { return stable_density(p, t); }, x, std::min(b, x + 0.5));
    return s;
}

}  // namespace

TEST(Positivity, Examples) {
    EXPECT_DOUBLE_EQ(positivity_rho(2.0, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(positivity_rho(1.5, 0.0), 0.5);
    EXPECT_NEAR(positivity_rho(1.5, 1.0), 1.0 / 3.0, 1e-15);
    EXPECT_THROW(positivity_rho(1.0, 0.0), DomainError);
    EXPECT_THROW(positivity_rho(1.5, 1.2), DomainError);
    EXPECT_DOUBLE_EQ(make_stable(2.0, 0.7).beta, 0.0);
    EXPECT_DOUBLE_EQ(make_stable(2.0, 0.7).rho, 0.5);
}

TEST(Positivity, MatchesDensityQuadrature) {
    for (double beta : {0.0, 0.5, 1.0}) {
        StableParams p = make_stable(1.5, beta);
        double mass = density_mass(p, 0.0, 20.0) + stable_tail(p, 20.0);
        EXPECT_NEAR(mass, p.rho, 1e-6) << "beta=" << beta;
    }
}

TEST(Density, GaussianCase) {
    StableParams p = make_stable(2.0, 0.0);
    EXPECT_NEAR(stable_density(p, 0.0), 1.0 / std::sqrt(4.0 * pi), 1e-15);
    EXPECT_NEAR(stable_density(p, 1.3), std::exp(-1.3 * 1.3 / 4.0) / std::sqrt(4.0 * pi), 1e-15);
}

TEST(Density, IntegratesToOne) {
    for (double beta : {0.0, 1.0}) {
        StableParams p = make_stable(1.5, beta);
        double mass = density_mass(p, -20.0, 20.0) + stable_tail(p, 20.0) + (1.0 - stable_tail(p, -20.0));
        EXPECT_NEAR(mass, 1.0, 1e-6) << "beta=" << beta;
    }
}

TEST(Density, PowerTailConstant) {
    // f(x) x^{a+1} -> a (1+b) Gamma(a) sin(pi a/2) / pi for the unit-scale law.
    StableParams p = make_stable(1.5, 1.0);
    double limit = 1.5 * 2.0 * std::tgamma(1.5) * std::sin(0.75 * pi) / pi;
    double prev = 0.0;
    for (double x : {25.0, 50.0, 100.0, 200.0}) {
        double v = stable_density(p, x) * std::pow(x, 2.5);
        EXPECT_GT(v, 0.0);
        if (prev > 0.0) EXPECT_LT(std::fabs(v - limit), std::fabs(prev - limit) + 1e-12);
        prev = v;
    }
    EXPECT_NEAR(prev, limit, 0.01 * limit);
}

TEST(Density, NonnegativeOnGrid) {
    for (double beta : {-0.5, 0.0, 0.5, 1.0}) {
        StableParams p = make_stable(1.3, beta);
        for (double x = -30.0; x <= 30.0; x += 0.37) EXPECT_GE(stable_density(p, x), 0.0) << x;
    }
}

TEST(Density, RoutesAgreeAtSwitch) {
    for (double beta : {0.0, 0.3, 1.0}) {
        StableParams p = make_stable(1.5, beta);
        for (double x : {-8.0, 8.0}) {
            EXPECT_NEAR(stable_density_transform(p, x), stable_density_zolotarev(p, x), 1e-10) << beta << " " << x;
            EXPECT_NEAR(stable_tail_transform(p, x), stable_tail_zolotarev(p, x), 1e-10) << beta << " " << x;
        }
    }
}

TEST(Tail, Examples) {
    StableParams g = make_stable(2.0, 0.0);
    EXPECT_DOUBLE_EQ(stable_tail(g, 0.0), 0.5);
    EXPECT_NEAR(stable_tail(g, 2.0), normal_sf(2.0 / std::sqrt(2.0)), 1e-16);
    EXPECT_NEAR(stable_tail(g, 2.0), 0.07865, 1e-5);
    StableParams s = make_stable(1.5, 1.0);
    EXPECT_NEAR(stable_tail(s, 0.0), 1.0 / 3.0, 1e-9);
}

TEST(Tail, ScalingContract) {
    for (double beta : {0.0, 1.0}) {
        StableParams p = make_stable(1.5, beta);
        for (double t : {0.5, 2.0})
            for (double x : {-2.0, -0.5, 0.3, 1.0, 4.0})
                EXPECT_NEAR(stable_tail_at_time(p, t, x), stable_tail(p, x * std::pow(t, -1.0 / 1.5)), 1e-6)
                    << beta << " " << t << " " << x;
    }
}

TEST(Tail, Nonincreasing) {
    StableParams p = make_stable(1.5, 0.4);
    double prev = 1.0;
    for (double x = -40.0; x <= 40.0; x += 0.25) {
        double v = stable_tail(p, x);
        EXPECT_LE(v, prev + 1e-13) << x;
        prev = v;
    }
}

TEST(Tail, LimitLawNormalization) {
    // At alpha = 2 the normalized limit is standard normal.
    StableParams g = make_stable(2.0, 0.0);
    EXPECT_NEAR(limit_scale(2.0), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(limit_tail(g, 1.0), normal_sf(1.0), 1e-15);
    // Scale continuity as alpha -> 2.
    EXPECT_NEAR(limit_scale(1.999), limit_scale(2.0), 1e-3);
}

TEST(Sampler, GaussianMean) {
    StableParams p = make_stable(2.0, 0.0);
    Rng rng(42);
    const int N = 1000000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < N; ++i) {
        double y = sample_stable(p, rng);
        s += y;
        s2 += y * y;
    }
    EXPECT_LT(std::fabs(s / N), 3.0 * std::sqrt(2.0 / N));
    EXPECT_NEAR(s2 / N, 2.0, 0.02);
}

TEST(Sampler, PositivityMatchesRho) {
    const int N = 1000000;
    for (double beta : {0.0, 1.0}) {
        StableParams p = make_stable(1.5, beta);
        Rng rng(7, static_cast<std::uint64_t>(beta * 10));
        int pos = 0, above = 0;
        for (int i = 0; i < N; ++i) {
            double y = sample_stable(p, rng);
            pos += y >= 0.0;
            above += y > 1.0;
        }
        double sd = std::sqrt(p.rho * (1 - p.rho) / N);
        EXPECT_NEAR(static_cast<double>(pos) / N, p.rho, 3.0 * sd) << beta;
        // Sign convention of the skewness: compare an off-centre probability too.
        double q = stable_tail(p, 1.0);
        EXPECT_NEAR(static_cast<double>(above) / N, q, 4.0 * std::sqrt(q * (1 - q) / N)) << beta;
    }
}
