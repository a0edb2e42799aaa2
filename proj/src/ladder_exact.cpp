#include "ladder/ladder_exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "ladder/convolve.hpp"
#include "ladder/error.hpp"
#include "ladder/kernels.hpp"

namespace ladder {
namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
    // den > 0
    if (num >= 0) return (num + den - 1) / den;
    return -((-num) / den);
}

struct Step {
    std::vector<double> taps;  // taps[i] is the mass of a jump by lo + i lattice units
    std::int64_t lo = 0;
    std::int64_t down = 0;  // largest downward jump
    std::int64_t up = 0;    // largest upward jump
};

Step step_of(const IncrementModel& m, bool negate) {
    Step s;
    s.taps = m.mass;
    s.lo = m.lo;
    if (negate) {
        std::reverse(s.taps.begin(), s.taps.end());
        s.lo = -m.hi();
    }
    std::int64_t hi = s.lo + static_cast<std::int64_t>(s.taps.size()) - 1;
    s.down = std::max<std::int64_t>(0, -s.lo);
    s.up = std::max<std::int64_t>(0, hi);
    return s;
}

double range_sum(const std::vector<double>& v, std::size_t from, std::size_t to) {
    if (to <= from) return 0.0;
    return kernels::active().sum(v.data() + from, to - from);
}

// Survival of the lattice walk T_j under T_j >= thr[j], j = 1..N. Mass that
// can no longer be killed before N is folded into a scalar.
struct SurvivalRun {
    std::vector<double> probs;
    Provenance prov;
};

SurvivalRun run_survival(const Step& st, const std::vector<std::int64_t>& thr, std::int64_t N, double span,
                         double shift, const DpOptions& opt) {
    SurvivalRun out;
    out.probs.assign(static_cast<std::size_t>(N) + 1, 0.0);
    out.probs[0] = 1.0;
    out.prov.kernel = kernels::active().name;
    std::vector<std::int64_t> fold(static_cast<std::size_t>(N) + 1, kInf);
    for (std::int64_t k = N - 1; k >= 0; --k) {
        std::int64_t f = thr[k + 1] + st.down;
        if (fold[k + 1] != kInf) f = std::max(f, fold[k + 1] + st.down);
        fold[k] = f;
    }
    Convolver conv(st.taps, opt.fft_threshold);
    std::vector<double> cur{1.0}, nxt;
    std::int64_t base = 0;
    double safe = 0.0;
    for (std::int64_t j = 1; j <= N; ++j) {
        if (cur.empty()) {
            for (std::int64_t r = j; r <= N; ++r) out.probs[r] = safe;
            break;
        }
        conv.apply(cur, nxt);
        std::int64_t nbase = base + st.lo;
        std::int64_t t = thr[j];
        if (nbase < t) {
            auto k = static_cast<std::size_t>(std::min<std::int64_t>(t - nbase, static_cast<std::int64_t>(nxt.size())));
            for (std::size_t i = 0; i < k; ++i) {
                if (nxt[i] == 0.0) continue;
                out.prov.killed_mass += nxt[i];
                double s = span * static_cast<double>(nbase + static_cast<std::int64_t>(i)) - shift * static_cast<double>(j);
                out.prov.killed_first_moment += nxt[i] * s;
            }
            nxt.erase(nxt.begin(), nxt.begin() + static_cast<std::ptrdiff_t>(k));
            nbase = t;
        }
        if (j < N && fold[j] != kInf && nbase + static_cast<std::int64_t>(nxt.size()) > fold[j]) {
            auto idx = static_cast<std::size_t>(std::max<std::int64_t>(0, fold[j] - nbase));
            safe += range_sum(nxt, idx, nxt.size());
            nxt.resize(idx);
        }
        double arr = range_sum(nxt, 0, nxt.size());
        if (opt.truncation > 0.0 && !nxt.empty()) {
            double limit = opt.truncation * (arr + safe), acc = 0.0;
            std::size_t e = nxt.size();
            while (e > 0 && acc + nxt[e - 1] < limit) acc += nxt[--e];
            if (e < nxt.size()) {
                out.prov.truncated_mass += acc;
                nxt.resize(e);
                arr -= acc;
            }
        }
        std::size_t lead = 0;
        while (lead < nxt.size() && nxt[lead] == 0.0) ++lead;
        if (lead > 0) {
            nxt.erase(nxt.begin(), nxt.begin() + static_cast<std::ptrdiff_t>(lead));
            nbase += static_cast<std::int64_t>(lead);
        }
        if (nxt.size() > opt.max_width)
            throw ResourceError("DP grid exceeds max_width; raise the truncation threshold or lower n");
        out.prov.max_width = std::max(out.prov.max_width, nxt.size());
        out.probs[j] = arr + safe;
        cur.swap(nxt);
        base = nbase;
    }
    out.prov.fft = conv.used_fft();
    return out;
}

std::vector<std::int64_t> thresholds(const RationalShift& r, std::int64_t N) {
    std::vector<std::int64_t> thr(static_cast<std::size_t>(N) + 1);
    for (std::int64_t j = 0; j <= N; ++j) thr[j] = ceil_div(j * r.p, r.q);
    return thr;
}

void require_n(std::int64_t n) {
    if (n < 0) throw DomainError("n must be nonnegative");
}

}  // namespace

const char* route_name(Route r) {
    switch (r) {
        case Route::dp: return "dp";
        case Route::spitzer: return "spitzer";
        case Route::bruteforce: return "bruteforce";
        case Route::montecarlo: return "montecarlo";
        case Route::rational: return "rational";
    }
    return "?";
}

std::uint64_t model_hash(const IncrementModel& m) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    auto kind = static_cast<int>(m.kind);
    feed(&kind, sizeof kind);
    feed(&m.span, sizeof m.span);
    feed(&m.lo, sizeof m.lo);
    if (!m.mass.empty()) feed(m.mass.data(), m.mass.size() * sizeof(double));
    feed(&m.tail_exponent, sizeof m.tail_exponent);
    feed(&m.tail_scale, sizeof m.tail_scale);
    feed(&m.drift, sizeof m.drift);
    unsigned char pd = m.pre_drifted ? 1 : 0;
    feed(&pd, 1);
    return h;
}

LadderTailTable survival_dp(const IncrementModel& m, double a, std::int64_t n, const DpOptions& opt) {
    require_n(n);
    if (!m.is_lattice()) throw DomainError("survival_dp needs a lattice model");
    RationalShift r = lattice_shift(m, a);
    Step st = step_of(m, false);
    auto run = run_survival(st, thresholds(r, n), n, m.span, effective_shift(m, a), opt);
    LadderTailTable t;
    t.probs = std::move(run.probs);
    t.route = Route::dp;
    t.model = m.name;
    t.model_hash = model_hash(m);
    t.drift = a;
    t.provenance = run.prov;
    return t;
}

namespace {

std::vector<std::int64_t> ascending_thresholds(const RationalShift& r, std::int64_t N) {
    std::vector<std::int64_t> thr(static_cast<std::size_t>(N) + 1);
    for (std::int64_t j = 0; j <= N; ++j) thr[j] = 1 - ceil_div(j * r.p, r.q);
    return thr;
}

}  // namespace

std::vector<double> ascending_survival(const IncrementModel& m, double a, std::int64_t n, const DpOptions& opt) {
    require_n(n);
    if (!m.is_lattice()) throw DomainError("ascending_survival needs a lattice model");
    RationalShift r = lattice_shift(m, a);
    Step st = step_of(m, true);
    return run_survival(st, ascending_thresholds(r, n), n, m.span, 0.0, opt).probs;
}

std::vector<double> marginal_nonneg_probs(const IncrementModel& m, double a, std::int64_t n, const DpOptions& opt) {
    require_n(n);
    if (!m.is_lattice()) throw DomainError("marginal_nonneg_probs needs a lattice model");
    RationalShift r = lattice_shift(m, a);
    Step st = step_of(m, false);
    auto thr = thresholds(r, n);
    std::vector<std::int64_t> fold(static_cast<std::size_t>(n) + 1, kInf), low(static_cast<std::size_t>(n) + 1, -kInf);
    for (std::int64_t k = n - 1; k >= 0; --k) {
        std::int64_t f = thr[k + 1] + st.down, l = thr[k + 1] - st.up;
        if (fold[k + 1] != kInf) f = std::max(f, fold[k + 1] + st.down);
        if (low[k + 1] != -kInf) l = std::min(l, low[k + 1] - st.up);
        fold[k] = f;
        low[k] = l;
    }
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    out[0] = 1.0;
    Convolver conv(st.taps, opt.fft_threshold);
    std::vector<double> cur{1.0}, nxt;
    std::int64_t base = 0;
    double above = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) {
        if (cur.empty()) {
            for (std::int64_t r2 = k; r2 <= n; ++r2) out[r2] = above;
            break;
        }
        conv.apply(cur, nxt);
        std::int64_t nbase = base + st.lo;
        auto from = static_cast<std::size_t>(std::clamp<std::int64_t>(thr[k] - nbase, 0, static_cast<std::int64_t>(nxt.size())));
        out[k] = std::min(1.0, above + range_sum(nxt, from, nxt.size()));
        if (k < n) {
            if (nbase < low[k]) {
                auto d = static_cast<std::size_t>(std::min<std::int64_t>(low[k] - nbase, static_cast<std::int64_t>(nxt.size())));
                nxt.erase(nxt.begin(), nxt.begin() + static_cast<std::ptrdiff_t>(d));
                nbase += static_cast<std::int64_t>(d);
            }
            if (nbase + static_cast<std::int64_t>(nxt.size()) > fold[k]) {
                auto idx = static_cast<std::size_t>(std::max<std::int64_t>(0, fold[k] - nbase));
                above += range_sum(nxt, idx, nxt.size());
                nxt.resize(idx);
            }
        }
        while (!nxt.empty() && nxt.back() < 1e-300) nxt.pop_back();
        std::size_t lead = 0;
        while (lead < nxt.size() && nxt[lead] < 1e-300) ++lead;
        if (lead > 0) {
            nxt.erase(nxt.begin(), nxt.begin() + static_cast<std::ptrdiff_t>(lead));
            nbase += static_cast<std::int64_t>(lead);
        }
        if (nxt.size() > opt.max_width) throw ResourceError("marginal grid exceeds max_width");
        cur.swap(nxt);
        base = nbase;
    }
    return out;
}

double LatticePmf::tail_ge_index(std::int64_t k) const {
    if (k <= lo) return 1.0;
    if (k > hi()) return 0.0;
    auto i = static_cast<std::size_t>(k - lo);
    return std::min(1.0, range_sum(mass, i, mass.size()));
}

LatticePmf sum_distribution(const IncrementModel& m, std::int64_t n, const DpOptions& opt) {
    require_n(n);
    if (!m.is_lattice()) throw DomainError("sum_distribution needs a lattice model");
    Convolver conv(m.mass, opt.fft_threshold);
    LatticePmf p;
    p.span = m.span;
    p.mass = {1.0};
    std::vector<double> nxt;
    for (std::int64_t k = 1; k <= n; ++k) {
        conv.apply(p.mass, nxt);
        if (conv.last_used_fft()) {
            double peak = *std::max_element(nxt.begin(), nxt.end());
            p.noise_floor += static_cast<double>(nxt.size()) * 4.0 * std::numeric_limits<double>::epsilon() * peak;
        }
        p.mass.swap(nxt);
        p.lo += m.lo;
        if (p.mass.size() > opt.max_width) throw ResourceError("sum_distribution grid exceeds max_width");
    }
    return p;
}

LadderTailTable spitzer_recurrence(const std::vector<double>& marginals) {
    if (marginals.empty()) throw DomainError("marginals must contain at least element 0");
    for (std::size_t k = 1; k < marginals.size(); ++k)
        if (!(marginals[k] >= 0.0 && marginals[k] <= 1.0)) throw DomainError("marginal probability outside [0,1]");
    const std::size_t N = marginals.size() - 1;
    LadderTailTable t;
    t.route = Route::spitzer;
    t.probs.assign(N + 1, 0.0);
    t.probs[0] = 1.0;
    t.provenance.kernel = kernels::active().name;
    // rev[s] = marginals[N - s], so marginals[n - j] = rev[N - n + j].
    std::vector<double> rev(N);
    for (std::size_t s = 0; s < N; ++s) rev[s] = marginals[N - s];
    const auto& k = kernels::active();
    for (std::size_t n = 1; n <= N; ++n)
        t.probs[n] = k.dot(t.probs.data(), rev.data() + (N - n), n) / static_cast<double>(n);
    return t;
}

double genf_check(const LadderTailTable& table, const std::vector<double>& marginals, std::int64_t m) {
    if (m < 0) throw DomainError("m must be nonnegative");
    if (m == 0) return std::fabs(table.probs.at(0) - 1.0);
    if (static_cast<std::size_t>(m) >= table.probs.size() || static_cast<std::size_t>(m) >= marginals.size())
        throw DomainError("genf_check needs m <= n");
    const auto M = static_cast<std::size_t>(m);
    // exp(A) = sum_j A^j / j!, truncated at z^m; A has no constant term so
    // powers beyond m do not contribute.
    std::vector<long double> A(M + 1, 0.0L), term(M + 1, 0.0L), G(M + 1, 0.0L), nxt(M + 1);
    for (std::size_t k = 1; k <= M; ++k) A[k] = static_cast<long double>(marginals[k]) / static_cast<long double>(k);
    term[0] = 1.0L;
    G[0] = 1.0L;
    for (std::size_t j = 1; j <= M; ++j) {
        std::fill(nxt.begin(), nxt.end(), 0.0L);
        for (std::size_t p = 0; p <= M; ++p) {
            if (term[p] == 0.0L) continue;
            for (std::size_t q = 1; p + q <= M; ++q) nxt[p + q] += term[p] * A[q];
        }
        for (std::size_t p = 0; p <= M; ++p) {
            term[p] = nxt[p] / static_cast<long double>(j);
            G[p] += term[p];
        }
    }
    double worst = 0.0;
    for (std::size_t j = 0; j <= M; ++j)
        worst = std::max(worst, static_cast<double>(std::fabs(G[j] - static_cast<long double>(table.probs[j]))));
    return worst;
}

LadderTailTable enumerate_bruteforce(const IncrementModel& m, double a, std::int64_t n) {
    require_n(n);
    if (!m.is_lattice()) throw DomainError("enumeration needs a lattice model");
    const double shift = effective_shift(m, a);
    std::vector<double> xs, ps;
    for (std::size_t i = 0; i < m.mass.size(); ++i)
        if (m.mass[i] > 0.0) {
            xs.push_back(m.point(m.lo + static_cast<std::int64_t>(i)) - shift);
            ps.push_back(m.mass[i]);
        }
    if (std::pow(static_cast<double>(xs.size()), static_cast<double>(n)) > 1e8)
        throw ResourceError("enumeration guard: |support|^n exceeds 1e8");
    std::vector<long double> acc(static_cast<std::size_t>(n) + 1, 0.0L);
    const double eps = 1e-9 * m.span;
    auto rec = [&](auto&& self, std::int64_t depth, double s, long double prob) -> void {
        acc[depth] += prob;
        if (depth == n) return;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double s2 = s + xs[i];
            if (s2 >= -eps) self(self, depth + 1, s2, prob * static_cast<long double>(ps[i]));
        }
    };
    rec(rec, 0, 0.0, 1.0L);
    LadderTailTable t;
    t.route = Route::bruteforce;
    t.model = m.name;
    t.model_hash = model_hash(m);
    t.drift = a;
    t.probs.resize(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) t.probs[j] = static_cast<double>(acc[j]);
    return t;
}

ExpectedTau expected_tau(const IncrementModel& m, double a, std::int64_t max_horizon, double tol) {
    if (!m.is_lattice()) throw DomainError("expected_tau needs a lattice model");
    if (effective_shift(m, a) <= 0.0 && !m.pre_drifted) throw DomainError("E tau is infinite at zero drift");
    if (m.pre_drifted && a <= 0.0) throw DomainError("E tau is infinite at zero drift");
    const bool heavy = m.kind == ModelKind::ParetoTail;
    ExpectedTau e;
    std::int64_t N = heavy ? std::min<std::int64_t>(4000, max_horizon) : std::min<std::int64_t>(4096, max_horizon);
    for (;;) {
        auto t = survival_dp(m, a, N);
        const auto& P = t.probs;
        double S = kernels::active().sum(P.data(), P.size());
        e.partial_sum = S;
        e.horizon = N;
        e.overshoot_mean = t.provenance.killed_first_moment;
        if (heavy) {
            // P(tau > j) ~ E tau P(X >= j a) for large j.
            std::vector<double> suffix(m.mass.size() + 1, 0.0);
            for (std::size_t i = m.mass.size(); i-- > 0;) suffix[i] = suffix[i + 1] + m.mass[i];
            auto tail = [&](double x) {
                double k0 = std::ceil(x / m.span - 1e-9);
                std::int64_t idx = static_cast<std::int64_t>(k0) - m.lo;
                if (idx <= 0) return 1.0;
                if (idx >= static_cast<std::int64_t>(m.mass.size())) return 0.0;
                return suffix[static_cast<std::size_t>(idx)];
            };
            double R = 0.0;
            for (std::int64_t j = N + 1;; ++j) {
                double v = tail(static_cast<double>(j) * a);
                if (v == 0.0) break;
                R += v;
            }
            if (!(R < 1.0)) throw ConvergenceError("expected_tau: heavy-tail extrapolation diverges");
            e.value = S / (1.0 - R);
            e.tail_estimate = e.value - S;
            e.method = "dp+heavy-tail-extrapolation";
            return e;
        }
        double pN = P[N], pN2 = P[N - 2];
        if (pN == 0.0) {
            e.value = S;
            e.method = "dp";
            return e;
        }
        double r = std::sqrt(pN / pN2);
        if (r < 1.0) {
            e.tail_estimate = pN * r / (1.0 - r);
            if (e.tail_estimate < tol * S || N >= max_horizon) {
                e.value = S + e.tail_estimate;
                e.method = "dp+geometric-tail";
                if (e.tail_estimate > 1e-6 * S) throw ConvergenceError("expected_tau: horizon too short");
                return e;
            }
        } else if (N >= max_horizon) {
            throw ConvergenceError("expected_tau: survival not decaying within max_horizon");
        }
        N = std::min(max_horizon, 2 * N);
    }
}

}  // namespace ladder
