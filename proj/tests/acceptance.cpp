// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ladder/increments.hpp"
#include "ladder/ladder_exact.hpp"
#include "ladder/large_dev.hpp"
#include "ladder/limit_laws.hpp"
#include "ladder/monte_carlo.hpp"

using namespace ladder;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

double rel(double x, double y) { return std::fabs(x - y) / std::max(std::fabs(x), std::fabs(y)); }

// Random centred law on a random subset of {-2h..2h}.
IncrementModel random_lattice(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::bernoulli_distribution keep(0.6);
    const double h = std::bernoulli_distribution(0.5)(g) ? 1.0 : 0.5;
    for (;;) {
        std::vector<double> w(5, 0.0);
        for (int i = 0; i < 5; ++i)
            if (keep(g)) w[i] = u(g);
        double neg = 2 * w[0] + w[1], pos = w[3] + 2 * w[4];
        if (neg == 0.0 || pos == 0.0) continue;
        w[3] *= neg / pos;
        w[4] *= neg / pos;
        double s = 0.0;
        for (double x : w) s += x;
        for (double& x : w) x /= s;
        return make_lattice(h, -2, w, 0.0, "random");
    }
}

Outcome criterion1() {
    Outcome o;
    std::mt19937_64 g(20240601);
    double worst = 0.0;
    int models = 0;
    std::int64_t max_n = 0;
    while (models < 20) {
        IncrementModel m = random_lattice(g);
        std::size_t support = 0;
        for (double x : m.mass) support += x > 0.0;
        // Enumeration guard: |support|^n <= 1e8.
        auto n = std::min<std::int64_t>(14, static_cast<std::int64_t>(std::floor(8.0 / std::log10(static_cast<double>(support)))));
        const double a = m.span * std::uniform_int_distribution<int>(0, 2)(g) / 4.0;
        auto dp = survival_dp(m, a, n);
        auto bf = enumerate_bruteforce(m, a, n);
        for (std::size_t j = 0; j < dp.probs.size(); ++j) worst = std::max(worst, std::fabs(dp.probs[j] - bf.probs[j]));
        max_n = std::max(max_n, n);
        ++models;
    }
    o.detail << "20 models, n up to " << max_n << ", max abs diff " << worst;
    o.require(worst <= 1e-12, "abs diff > 1e-12");
    return o;
}

Outcome criterion2() {
    Outcome o;
    double worst = 0.0, worst_g = 0.0;
    std::vector<std::pair<IncrementModel, double>> cases;
    for (double a : {0.0, 0.1, 0.25}) cases.emplace_back(make_symmetric_pm1(), a);
    for (double a : {0.05, 0.1, 0.2}) cases.emplace_back(make_pbiased(a), a);
    for (const auto& [m, a] : cases) {
        auto dp = survival_dp(m, a, 500);
        auto mg = marginal_nonneg_probs(m, a, 500);
        auto sp = spitzer_recurrence(mg);
        for (std::size_t j = 0; j < dp.probs.size(); ++j) worst = std::max(worst, rel(dp.probs[j], sp.probs[j]));
        for (std::int64_t k : {10, 25, 50}) worst_g = std::max(worst_g, genf_check(dp, mg, k));
    }
    o.detail << "max rel diff " << worst << ", max genf residual " << worst_g;
    o.require(worst <= 1e-10, "rel diff > 1e-10");
    o.require(worst_g <= 1e-10, "genf > 1e-10");
    return o;
}

Outcome criterion3() {
    Outcome o;
    StableParams g = make_stable(2.0, 0.0);
    double c = moment_constant(1.0, g);
    double err = std::fabs(c - std::sqrt(std::numbers::pi / 2.0));
    double res = 0.0;
    for (double u : {0.25, 0.5, 1.0, 2.0, 4.0}) res = std::max(res, integral_equation_residual(brownian_correction, g, u));
    o.detail << "moment constant error " << err << ", max residual " << res;
    o.require(err <= 1e-8, "moment constant");
    o.require(res <= 1e-6, "residual");
    return o;
}

Outcome criterion4() {
    Outcome o;
    StableParams g = make_stable(2.0, 0.0);
    double worst = 0.0;
    for (double lam : {0.5, 1.0, 2.0})
        worst = std::max(worst, std::fabs(laplace_lhs(brownian_correction, g, lam) - laplace_rhs(g, lam)));
    o.detail << "max |lhs - rhs| " << worst;
    o.require(worst <= 1e-5, "Laplace sides differ");
    return o;
}

Outcome criterion5() {
    Outcome o;
    auto pm = make_symmetric_pm1();
    for (double v : {0.25, 1.0, 4.0}) {
        double target = brownian_correction(std::sqrt(v));
        std::vector<double> err;
        for (double a : {0.1, 0.05, 0.02}) {
            auto n = static_cast<std::int64_t>(std::llround(v / (a * a)));
            double ratio = survival_dp(make_pbiased(a), a, n).probs.back() / survival_dp(pm, 0.0, n).probs.back();
            err.push_back(std::fabs(ratio / target - 1.0));
        }
        o.detail << " v=" << v << ": err " << err[0] << " -> " << err[2] << ";";
        o.require(err[2] <= 0.10, "v=" + std::to_string(v) + " error at a=0.02 > 10%");
        o.require(err[2] < err[0], "v=" + std::to_string(v) + " no improvement");
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    const double tol[] = {0.05, 0.03, 0.02};
    int i = 0;
    for (double a : {0.1, 0.05, 0.02}) {
        double e = a * expected_tau(make_pbiased(a), a).value;
        o.detail << " a=" << a << ": a E tau " << e << ";";
        o.require(std::fabs(e - 1.0) <= tol[i++], "a E tau off at a=" + std::to_string(a));
    }
    auto pred = expectation_finite_variance(make_pbiased(0.0));
    o.detail << " series " << pred.series.value << ", constant " << pred.constant;
    o.require(std::fabs(pred.series.value - std::log(2.0) / 2.0) <= 1e-3, "series value");
    o.require(std::fabs(pred.constant - 1.0) <= 1e-3, "predictor constant");
    return o;
}

Outcome criterion7() {
    Outcome o;
    const double a = 0.2;
    auto m = make_pbiased(a);
    auto t = survival_dp(m, a, 4000);
    const double xi = -0.5 * std::log(1.0 - a * a);
    const double eexp = std::sqrt((1.0 + a) / (1.0 - a));
    std::vector<double> err;
    for (std::int64_t n : {1000, 2000, 4000}) {
        double cor = ld_exponential_predict(a, n, eexp, xi);
        err.push_back(std::fabs(t.probs[n] / cor - 1.0));
    }
    o.detail << "rel err " << err[0] << ", " << err[1] << ", " << err[2];
    o.require(err[1] <= 0.25, "error at n=2000 > 25%");
    o.require(err[1] < err[0] && err[2] < err[1], "error not decreasing in n");
    return o;
}

Outcome criterion8() {
    Outcome o;
    const double a = 0.3;
    struct Corpus {
        IncrementModel m;
        std::int64_t max_n;
    };
    for (const auto& [m, max_n] : {Corpus{make_pareto(3.5, 0.1, 20000), 8000}, Corpus{make_pareto(1.5, 0.1, 40000), 32000}}) {
        double etau = expected_tau(m, a).value;
        auto base = with_drift(m, 0.0);
        std::int64_t n0 = 125;
        while (a * static_cast<double>(n0) / norming_c(base, static_cast<double>(n0)) < 10.0) n0 *= 2;
        std::int64_t top = n0 * 8;
        if (top > max_n) {
            o.require(false, m.name + ": grid exceeds budget");
            continue;
        }
        auto t = survival_dp(m, a, top);
        std::vector<double> r;
        for (std::int64_t n = n0; n <= top; n *= 2) r.push_back(t.probs[n] / ld_heavy_predict(a, n, etau, m));
        o.detail << " " << m.name << "(t=" << m.tail_exponent << ") n=" << n0 << ".." << top << ": ratios";
        for (double x : r) o.detail << " " << x;
        o.detail << ";";
        o.require(r[0] >= 0.5 && r[0] <= 2.0, m.name + " ratio outside [0.5,2]");
        for (std::size_t i = 1; i < r.size(); ++i)
            o.require(std::fabs(r[i] - 1.0) < std::fabs(r[i - 1] - 1.0),
                      m.name + "(t=" + std::to_string(m.tail_exponent) + ") not monotone toward 1 at step " + std::to_string(i));
    }
    return o;
}

Outcome criterion9() {
    Outcome o;
    std::size_t points = 0;
    double worst_c = 0.0;
    for (const auto& m : {make_symmetric_pm1(), make_pareto(3.5, 0.1, 2000), make_pareto(1.5, 0.01, 3000)}) {
        auto cal = calibrate_fuk_nagaev(m, {10, 40, 160, 640});
        points += cal.points;
        worst_c = std::max(worst_c, cal.minimal_c);
    }
    o.detail << "FN: " << points << " points, minimal safe C " << worst_c << " (default " << kFukNagaevDefaultC << ");";
    o.require(points > 0 && worst_c <= kFukNagaevDefaultC, "bound violated at default C");
    // Shape: P(tau > n) (na)^2 / (E tau V(na)) must not grow over [n_a, 100 n_a].
    for (double a : {0.1, 0.05}) {
        for (const auto& m : {make_symmetric_pm1(), make_pareto(3.5, 0.1, 3000), make_pareto(1.5, 0.1, 3000)}) {
            auto na = boundary_n_a(m, a);
            double etau = expected_tau(with_drift(m, a), a).value;
            auto t = survival_dp(m, a, 100 * na);
            double near = 0.0, all = 0.0;
            for (std::int64_t n = na; n <= 100 * na; ++n) {
                double x = static_cast<double>(n) * a;
                double s = t.probs[n] * x * x / (etau * truncated_second_moment(m, x));
                if (n <= 10 * na) near = std::max(near, s);
                all = std::max(all, s);
            }
            o.detail << " " << m.name << " a=" << a << " max " << all << ";";
            o.require(std::isfinite(all) && all <= 2.0 * near, m.name + " shape statistic grows");
        }
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    auto pm = make_symmetric_pm1();
    auto e1 = estimate_tail(pm, 0.0, 3, 100000, 99, 1);
    auto e2 = estimate_tail(pm, 0.0, 3, 100000, 99, 1);
    auto e4 = estimate_tail(pm, 0.0, 3, 100000, 99, 4);
    o.require(e1.value == e2.value && e1.std_error == e2.std_error, "rerun differs");
    o.require(e1.value == e4.value, "thread count changes the result");
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto e = estimate_tail(pm, 0.0, 3, 10000, seed);
        covered += std::fabs(e.value - 0.375) <= 1.959964 * e.std_error;
    }
    o.require(covered >= 90 && covered <= 99, "coverage outside [90,99]");
    const double a = 0.2;
    const std::int64_t n = 2000, paths = 100000;
    auto m = make_pbiased(a);
    double p = survival_dp(m, a, n).probs.back();
    double plain_se = std::sqrt(p * (1 - p) / static_cast<double>(paths));
    auto tilted = tilted_estimate_tail(m, a, n, paths, 12);
    o.require(tilted.std_error <= plain_se, "tilted stderr above plain");
    o.detail << "bitwise reproducible; coverage " << covered << "/100; stderr tilted " << tilted.std_error << " vs plain "
             << plain_se;
    return o;
}

}  // namespace

int main() {
    std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                   criterion6, criterion7, criterion8, criterion9, criterion10};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("Criterion %zu: %s  %s  (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
