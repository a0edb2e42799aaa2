#include "ladder/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "ladder/error.hpp"
#include "ladder/large_dev.hpp"
#include "ladder/rng.hpp"

namespace ladder {
namespace {

constexpr std::int64_t kBlock = 4096;

// Draws X - a (or the p-biased step), optionally under the exponential tilt h.
class StepSampler {
public:
    StepSampler(const IncrementModel& m, double a, double h) : shift_(effective_shift(m, a)) {
        if (!m.is_lattice()) {
            gaussian_ = true;
            mean_ = h;
            return;
        }
        double mx = -1e300;
        for (std::size_t i = 0; i < m.mass.size(); ++i)
            if (m.mass[i] > 0.0) mx = std::max(mx, h * m.point(m.lo + static_cast<std::int64_t>(i)));
        double tot = 0.0;
        for (std::size_t i = 0; i < m.mass.size(); ++i) {
            if (m.mass[i] <= 0.0) continue;
            double x = m.point(m.lo + static_cast<std::int64_t>(i));
            double w = h == 0.0 ? m.mass[i] : m.mass[i] * std::exp(h * x - mx);
            tot += w;
            cdf_.push_back(tot);
            values_.push_back(x - shift_);
        }
        for (double& c : cdf_) c /= tot;
        cdf_.back() = 1.0;
    }

    double operator()(Rng& rng) const {
        if (gaussian_) return rng.normal() + mean_ - shift_;
        double u = rng.uniform();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return values_[static_cast<std::size_t>(it - cdf_.begin())];
    }

private:
    double shift_;
    bool gaussian_ = false;
    double mean_ = 0.0;
    std::vector<double> cdf_, values_;
};

struct Moments {
    double sum = 0.0, sumsq = 0.0, extra = 0.0;
};

Moments tree_sum(const std::vector<Moments>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return v[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    Moments a = tree_sum(v, lo, mid), b = tree_sum(v, mid, hi);
    return {a.sum + b.sum, a.sumsq + b.sumsq, a.extra + b.extra};
}

// Runs path_fn(path, rng) -> (value, extra) over all paths.
Moments run_paths(std::int64_t paths, std::uint64_t seed, unsigned threads,
                  const std::function<std::pair<double, double>(Rng&)>& path_fn) {
    const auto blocks = static_cast<std::size_t>((paths + kBlock - 1) / kBlock);
    std::vector<Moments> out(std::max<std::size_t>(blocks, 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= blocks) return;
            Moments m;
            std::int64_t first = static_cast<std::int64_t>(b) * kBlock;
            std::int64_t last = std::min(paths, first + kBlock);
            for (std::int64_t p = first; p < last; ++p) {
                Rng rng(seed, static_cast<std::uint64_t>(p));
                auto [v, e] = path_fn(rng);
                m.sum += v;
                m.sumsq += v * v;
                m.extra += e;
            }
            out[b] = m;
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1 || blocks <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return tree_sum(out, 0, out.size());
}

void finish(MCEstimate& e, const Moments& m) {
    auto N = static_cast<double>(e.paths);
    e.value = m.sum / N;
    double var = e.paths > 1 ? std::max(0.0, (m.sumsq - N * e.value * e.value) / (N - 1.0)) : 0.0;
    e.std_error = std::sqrt(var / N);
}

}  // namespace

MCEstimate estimate_tail(const IncrementModel& m, double a, std::int64_t n, std::int64_t paths, std::uint64_t seed,
                         unsigned threads) {
    if (paths < 1 || n < 0) throw DomainError("estimate_tail needs paths >= 1 and n >= 0");
    MCEstimate e;
    e.paths = paths;
    e.seed = seed;
    if (n == 0) {
        e.value = 1.0;
        return e;
    }
    StepSampler step(m, a, 0.0);
    auto path = [&](Rng& rng) -> std::pair<double, double> {
        double s = 0.0;
        for (std::int64_t k = 0; k < n; ++k) {
            s += step(rng);
            if (s < 0.0) return {0.0, 0.0};
        }
        return {1.0, 0.0};
    };
    finish(e, run_paths(paths, seed, threads, path));
    return e;
}

MCEstimate estimate_moment(const IncrementModel& m, double a, double r, std::int64_t paths, std::int64_t cap,
                           std::uint64_t seed, unsigned threads) {
    if (paths < 1 || cap < 1) throw DomainError("estimate_moment needs paths >= 1 and cap >= 1");
    DomainInfo d = domain_of(m);
    if (!(r >= 0.0) || r >= d.alpha) throw DomainError("moment order must lie in [0, alpha)");
    MCEstimate e;
    e.paths = paths;
    e.seed = seed;
    e.cap = cap;
    if (r == 0.0) {
        e.value = 1.0;
        return e;
    }
    StepSampler step(m, a, 0.0);
    auto path = [&](Rng& rng) -> std::pair<double, double> {
        double s = 0.0;
        for (std::int64_t k = 1; k <= cap; ++k) {
            s += step(rng);
            if (s < 0.0) return {std::pow(static_cast<double>(k), r), 0.0};
        }
        return {std::pow(static_cast<double>(cap), r), 1.0};
    };
    Moments mo = run_paths(paths, seed, threads, path);
    finish(e, mo);
    e.censored_fraction = mo.extra / static_cast<double>(paths);
    if (e.censored_fraction > 0.01) e.warning = "more than 1% of paths censored at cap; estimate biased low";
    return e;
}

MCEstimate tilted_estimate_tail(const IncrementModel& m, double a, std::int64_t n, std::int64_t paths,
                                std::uint64_t seed, unsigned threads) {
    double shift = effective_shift(m, a);
    bool zero = m.pre_drifted ? a == 0.0 : shift == 0.0;
    if (zero) return estimate_tail(m, a, n, paths, seed, threads);
    RatePair rp;
    try {
        rp = rate_xi(m, a, CorrectionOrder::full());
    } catch (const DomainError&) {
        MCEstimate e = estimate_tail(m, a, n, paths, seed, threads);
        e.warning = "tilt unavailable (no exponential moments); plain estimator used";
        return e;
    }
    if (paths < 1 || n < 0) throw DomainError("tilted_estimate_tail needs paths >= 1 and n >= 0");
    MCEstimate e;
    e.paths = paths;
    e.seed = seed;
    e.tilt = rp.h0;
    if (n == 0) {
        e.value = 1.0;
        return e;
    }
    // log M(h0) = -xi.
    const double log_weight_step = -rp.xi;
    const double h0 = rp.h0;
    StepSampler step(m, a, h0);
    auto path = [&](Rng& rng) -> std::pair<double, double> {
        double s = 0.0;
        for (std::int64_t k = 0; k < n; ++k) {
            s += step(rng);
            if (s < 0.0) return {0.0, 0.0};
        }
        return {std::exp(static_cast<double>(n) * log_weight_step - h0 * s), 0.0};
    };
    finish(e, run_paths(paths, seed, threads, path));
    return e;
}

}  // namespace ladder
