#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "ladder/convolve.hpp"
#include "ladder/increments.hpp"
#include "ladder/kernels.hpp"
#include "ladder/ladder_exact.hpp"

using namespace ladder;
using boost::multiprecision::cpp_rational;

namespace {

std::vector<double> random_vec(std::mt19937_64& g, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(g);
    return v;
}

double exact_sum(const std::vector<double>& v) {
    cpp_rational s = 0;
    for (double x : v) s += cpp_rational(x);
    return static_cast<double>(s);
}

double exact_dot(const std::vector<double>& x, const std::vector<double>& y) {
    cpp_rational s = 0;
    // The kernels accumulate rounded products; the oracle does the same.
    for (std::size_t i = 0; i < x.size(); ++i) s += cpp_rational(x[i] * y[i]);
    return static_cast<double>(s);
}

class ScalarGuard {
public:
    ~ScalarGuard() { kernels::force_scalar(false); }
};

}  // namespace

TEST(Kernels, AxpyVariantsBitwiseEqual) {
    if (!kernels::avx2_available()) GTEST_SKIP() << "no AVX2";
    std::mt19937_64 g(7);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 15u, 16u, 17u, 63u, 1000u}) {
        auto x = random_vec(g, n, -1.0, 1.0);
        auto y1 = random_vec(g, n, -1.0, 1.0);
        auto y2 = y1;
        kernels::scalar_table().axpy(0.3173, x.data(), y1.data(), n);
        kernels::avx2_table().axpy(0.3173, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(y1[i], y2[i]) << "n=" << n << " i=" << i;
    }
}

TEST(Kernels, CompensatedSumMatchesExactRational) {
    std::mt19937_64 g(11);
    std::vector<const kernels::KernelTable*> tables{&kernels::scalar_table()};
    if (kernels::avx2_available()) tables.push_back(&kernels::avx2_table());
    for (std::size_t n : {1u, 2u, 7u, 8u, 33u, 4097u}) {
        auto v = random_vec(g, n, 0.0, 1.0);
        for (std::size_t i = 0; i < n; i += 3) v[i] *= 1e-12;
        double ref = exact_sum(v);
        for (const auto* t : tables) EXPECT_NEAR(t->sum(v.data(), n), ref, 2e-16 * ref) << t->name << " n=" << n;
    }
    std::vector<double> cancel{1e16, 1.0, -1e16, 1.0, 1e-3, 0.0, 0.0, 0.0, 0.0};
    for (const auto* t : tables) EXPECT_EQ(t->sum(cancel.data(), cancel.size()), 2.001) << t->name;
}

TEST(Kernels, CompensatedDotMatchesExactRational) {
    std::mt19937_64 g(13);
    std::vector<const kernels::KernelTable*> tables{&kernels::scalar_table()};
    if (kernels::avx2_available()) tables.push_back(&kernels::avx2_table());
    for (std::size_t n : {1u, 5u, 8u, 31u, 1000u}) {
        auto x = random_vec(g, n, 0.0, 1.0);
        auto y = random_vec(g, n, 0.0, 1e-3);
        double ref = exact_dot(x, y);
        for (const auto* t : tables) EXPECT_NEAR(t->dot(x.data(), y.data(), n), ref, 2e-16 * ref) << t->name;
    }
}

TEST(Kernels, ForceScalarSwitchesActiveTable) {
    ScalarGuard guard;
    kernels::force_scalar(true);
    EXPECT_STREQ(kernels::active().name, kernels::scalar_table().name);
    kernels::force_scalar(false);
    if (kernels::avx2_available()) EXPECT_STREQ(kernels::active().name, kernels::avx2_table().name);
}

TEST(Kernels, SurvivalTablesAgreeAcrossVariants) {
    ScalarGuard guard;
    IncrementModel m = make_lattice(1.0, -2, {0.15, 0.3, 0.15, 0.2, 0.2});
    kernels::force_scalar(true);
    auto s = survival_dp(m, 0.25, 300);
    auto sm = marginal_nonneg_probs(m, 0.25, 300);
    auto ss = spitzer_recurrence(sm);
    kernels::force_scalar(false);
    auto v = survival_dp(m, 0.25, 300);
    auto vm = marginal_nonneg_probs(m, 0.25, 300);
    auto vs = spitzer_recurrence(vm);
    for (std::size_t j = 0; j < s.probs.size(); ++j) {
        EXPECT_NEAR(v.probs[j], s.probs[j], 1e-14 * s.probs[j]) << j;
        EXPECT_NEAR(vs.probs[j], ss.probs[j], 1e-14 * ss.probs[j]) << j;
    }
}

TEST(Convolver, DirectAndFftAgree) {
    std::mt19937_64 g(17);
    auto taps = random_vec(g, 300, 0.0, 1.0);
    auto in = random_vec(g, 2000, 0.0, 1.0);
    Convolver direct(taps, std::size_t{1} << 40), fft(taps, 0);
    std::vector<double> a, b;
    direct.apply(in, a);
    fft.apply(in, b);
    EXPECT_FALSE(direct.used_fft());
    EXPECT_TRUE(fft.used_fft());
    ASSERT_EQ(a.size(), b.size());
    double peak = 0.0;
    for (double x : a) peak = std::max(peak, x);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-13 * peak) << i;
}

TEST(Convolver, FftOutputIsNonnegative) {
    std::vector<double> taps(100, 0.0), in(500, 0.0);
    for (std::size_t i = 0; i < taps.size(); ++i) taps[i] = std::exp(-0.5 * static_cast<double>(i));
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = std::exp(-0.3 * static_cast<double>(i));
    Convolver fft(taps, 0);
    std::vector<double> out;
    fft.apply(in, out);
    for (double x : out) EXPECT_GE(x, 0.0);
}
