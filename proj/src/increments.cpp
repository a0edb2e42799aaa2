#include "ladder/increments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "ladder/error.hpp"
#include "ladder/special.hpp"

namespace ladder {
namespace {

constexpr double kMassTol = 1e-12;

// Neumaier accumulator; tables with millions of tiny entries drift otherwise.
struct Accumulator {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

double lattice_mean(const IncrementModel& m) {
    Accumulator s;
    for (std::size_t i = 0; i < m.mass.size(); ++i) s.add(m.point(m.lo + static_cast<std::int64_t>(i)) * m.mass[i]);
    return s.value();
}

// Prefix of x^2 mass by absolute lattice index: out[j] = V(j * span).
std::vector<double> v_prefix(const IncrementModel& m) {
    std::int64_t J = std::max(std::abs(m.lo), std::abs(m.hi()));
    std::vector<double> out(static_cast<std::size_t>(J) + 1, 0.0);
    for (std::int64_t j = 1; j <= J; ++j) {
        double x = m.point(j);
        double w = m.mass_at(j) + m.mass_at(-j);
        out[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(j - 1)] + x * x * w;
    }
    return out;
}

double gaussian_v(double u) {
    return (2.0 * normal_cdf(u) - 1.0) - 2.0 * u * normal_pdf(u);
}

// End of the region where V(u)/u^2 increases from 0.
double gaussian_u_min() {
    static const double u = [] {
        auto r = boost::math::tools::brent_find_minima(
            [](double x) { return -gaussian_v(x) / (x * x); }, 0.1, 5.0, 50);
        return r.first;
    }();
    return u;
}

std::vector<double> cumulants_from_central(double mean, const std::vector<double>& mu, int kmax) {
    // mu[j] = E (X - mean)^j, j = 0..kmax; cumulants of the centered law
    // then kappa_1 replaced by the mean.
    std::vector<double> kap(static_cast<std::size_t>(kmax) + 1, 0.0);
    std::vector<std::vector<double>> binom(static_cast<std::size_t>(kmax) + 1);
    for (int n = 0; n <= kmax; ++n) {
        binom[n].assign(static_cast<std::size_t>(n) + 1, 1.0);
        for (int k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
    }
    for (int n = 1; n <= kmax; ++n) {
        double s = mu[n];
        for (int k = 1; k < n; ++k) s -= binom[n - 1][k - 1] * kap[k] * mu[n - k];
        kap[n] = s;
    }
    kap[1] = mean;
    return kap;
}

}  // namespace

void validate(const IncrementModel& m) {
    if (!(m.drift >= 0.0) || !std::isfinite(m.drift)) throw DomainError("drift must be a finite nonnegative number");
    if (m.kind == ModelKind::GaussianUnit) return;
    if (!(m.span > 0.0) || !std::isfinite(m.span)) throw DomainError("lattice span must be positive");
    if (m.mass.empty()) throw DomainError("empty mass table");
    Accumulator s;
    for (double p : m.mass) {
        if (!(p >= 0.0)) throw DomainError("negative or NaN probability in mass table");
        s.add(p);
    }
    if (std::fabs(s.value() - 1.0) > kMassTol) throw DomainError("probabilities do not sum to 1");
    double target = m.pre_drifted ? -m.drift : 0.0;
    if (std::fabs(lattice_mean(m) - target) > kMassTol * std::max(1.0, m.span))
        throw DomainError(m.pre_drifted ? "pre-drifted law must have mean -drift"
                                        : "base law must have mean 0");
    if (m.kind == ModelKind::ParetoTail && !(m.tail_exponent > 1.0 && m.tail_exponent != 2.0))
        throw DomainError("Pareto tail exponent must lie in (1,2) or (2,inf)");
}

IncrementModel make_lattice(double span, std::int64_t lo, std::vector<double> mass, double drift,
                            std::string name) {
    IncrementModel m;
    m.kind = ModelKind::Lattice;
    m.name = std::move(name);
    m.span = span;
    m.lo = lo;
    m.mass = std::move(mass);
    m.drift = drift;
    m.cramer = true;
    // Strip zero mass at both ends so lo/hi describe the true support.
    while (m.mass.size() > 1 && m.mass.back() == 0.0) m.mass.pop_back();
    while (m.mass.size() > 1 && m.mass.front() == 0.0) {
        m.mass.erase(m.mass.begin());
        ++m.lo;
    }
    validate(m);
    return m;
}

IncrementModel make_symmetric_pm1(double drift) {
    return make_lattice(1.0, -1, {0.5, 0.0, 0.5}, drift, "pm1");
}

IncrementModel make_pbiased(double a) {
    if (!(a >= 0.0 && a < 1.0)) throw DomainError("p-biased walk needs a in [0,1)");
    IncrementModel m;
    m.kind = ModelKind::Lattice;
    m.name = "pbiased";
    m.span = 1.0;
    m.lo = -1;
    double p = (1.0 - a) / 2.0;
    m.mass = {1.0 - p, 0.0, p};
    m.drift = a;
    m.pre_drifted = true;
    m.cramer = true;
    validate(m);
    return m;
}

IncrementModel make_gaussian_unit(double drift) {
    IncrementModel m;
    m.kind = ModelKind::GaussianUnit;
    m.name = "gaussian";
    m.drift = drift;
    m.cramer = true;
    validate(m);
    return m;
}

IncrementModel make_pareto(double t, double scale, std::int64_t x_max, double span, double drift) {
    if (!(t > 1.0) || t == 2.0) throw DomainError("Pareto tail exponent must lie in (1,2) or (2,inf)");
    if (!(scale > 0.0 && scale < 1.0) || x_max < 2) throw DomainError("bad Pareto scale or x_max");
    std::vector<double> right(static_cast<std::size_t>(x_max), 0.0);
    auto sf = [&](std::int64_t k) { return scale * std::pow(static_cast<double>(k), -t); };
    for (std::int64_t k = 1; k < x_max; ++k) right[k - 1] = sf(k) - sf(k + 1);
    right[x_max - 1] = sf(x_max);
    Accumulator tot, first;
    for (std::int64_t k = 1; k <= x_max; ++k) {
        tot.add(right[k - 1]);
        first.add(static_cast<double>(k) * right[k - 1]);
    }
    double w = first.value();  // atom at -span balancing the right tail
    double p0 = 1.0 - tot.value() - w;
    if (!(p0 >= 0.0)) throw DomainError("Pareto scale too large to center with one left atom");
    std::vector<double> mass;
    mass.reserve(static_cast<std::size_t>(x_max) + 2);
    mass.push_back(w);
    mass.push_back(p0);
    mass.insert(mass.end(), right.begin(), right.end());
    IncrementModel m;
    m.kind = ModelKind::ParetoTail;
    m.name = "pareto";
    m.span = span;
    m.lo = -1;
    m.mass = std::move(mass);
    m.tail_exponent = t;
    m.tail_scale = scale;
    m.drift = drift;
    m.cramer = false;
    validate(m);
    return m;
}

IncrementModel discretize_gaussian(double span, double cutoff, double drift) {
    if (!(span > 0.0) || !(cutoff > span)) throw DomainError("bad discretization span");
    auto K = static_cast<std::int64_t>(std::ceil(cutoff / span));
    std::vector<double> mass(static_cast<std::size_t>(2 * K + 1));
    for (std::int64_t k = 0; k <= K; ++k) {
        double upper = k == K ? 0.0 : normal_sf((static_cast<double>(k) + 0.5) * span);
        double lower = k == 0 ? 0.5 : normal_sf((static_cast<double>(k) - 0.5) * span);
        double p = k == 0 ? 2.0 * (lower - upper) : lower - upper;
        mass[static_cast<std::size_t>(K + k)] = p;
        mass[static_cast<std::size_t>(K - k)] = p;
    }
    double s = 0.0;
    for (double p : mass) s += p;
    for (double& p : mass) p /= s;
    IncrementModel m = make_lattice(span, -K, std::move(mass), drift, "gaussian-lattice");
    return m;
}

IncrementModel with_drift(const IncrementModel& m, double a) {
    if (m.pre_drifted) return make_pbiased(a);
    IncrementModel out = m;
    out.drift = a;
    validate(out);
    return out;
}

IncrementModel zero_drift_counterpart(const IncrementModel& m) {
    if (m.pre_drifted) return make_symmetric_pm1(0.0);
    return with_drift(m, 0.0);
}

DomainInfo domain_of(const IncrementModel& m) {
    DomainInfo d;
    if (m.kind == ModelKind::ParetoTail) {
        d.regularly_varying_tail = true;
        if (m.tail_exponent < 2.0) {
            d.alpha = m.tail_exponent;
            d.beta = 1.0;
            d.finite_variance = false;
        }
    }
    return d;
}

double truncated_second_moment(const IncrementModel& m, double u) {
    if (!std::isfinite(u)) throw DomainError("truncation level must be finite");
    if (!(u > 0.0)) throw DomainError("truncation level must be positive");
    if (m.kind == ModelKind::GaussianUnit) return gaussian_v(u);
    double s = 0.0;
    double lim = u * (1.0 + 1e-12);
    for (std::size_t i = 0; i < m.mass.size(); ++i) {
        double x = m.point(m.lo + static_cast<std::int64_t>(i));
        if (std::fabs(x) <= lim) s += x * x * m.mass[i];
    }
    return s;
}

double norming_c(const IncrementModel& m, double n) {
    if (!(n >= 1.0)) throw DomainError("norming_c needs n >= 1");
    if (m.kind == ModelKind::GaussianUnit) {
        double umin = gaussian_u_min();
        if (gaussian_v(umin) / (umin * umin) <= 1.0 / n) return umin;
        auto f = [n](double u) { return gaussian_v(u) - u * u / n; };
        double hi = std::max(2.0 * umin, std::sqrt(n));
        while (f(hi) > 0.0) hi *= 2.0;
        boost::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(f, umin, hi, boost::math::tools::eps_tolerance<double>(50), it);
        return 0.5 * (r.first + r.second);
    }
    auto P = v_prefix(m);
    std::size_t J = P.size() - 1;
    std::size_t j = 1;
    while (j <= J && P[j] == 0.0) ++j;
    if (j > J) throw DomainError("degenerate model: V vanishes identically");
    const double h = m.span;
    for (; j < J; ++j) {
        double u = std::max(static_cast<double>(j) * h, std::sqrt(n * P[j]));
        if (u < static_cast<double>(j + 1) * h) return u;
    }
    return std::max(static_cast<double>(J) * h, std::sqrt(n * P[J]));
}

std::int64_t boundary_n_a(const IncrementModel& m, double a) {
    if (!(a > 0.0)) throw DomainError("boundary_n_a needs a > 0");
    auto ok = [&](std::int64_t n) { return a * static_cast<double>(n) > norming_c(m, static_cast<double>(n)); };
    if (ok(1)) return 1;
    std::int64_t lo = 1, hi = 2;
    while (!ok(hi)) {
        lo = hi;
        if (hi > (std::int64_t{1} << 52)) throw ResourceError("boundary_n_a: no crossing found");
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (ok(mid)) hi = mid; else lo = mid;
    }
    return hi;
}

double variance(const IncrementModel& m) {
    if (m.kind == ModelKind::GaussianUnit) return 1.0;
    double mean = lattice_mean(m), s = 0.0;
    for (std::size_t i = 0; i < m.mass.size(); ++i) {
        double d = m.point(m.lo + static_cast<std::int64_t>(i)) - mean;
        s += d * d * m.mass[i];
    }
    return s;
}

std::vector<double> centered_cumulants(const IncrementModel& m, int kmax) {
    if (kmax < 1) throw DomainError("cumulant order must be positive");
    if (m.kind == ModelKind::ParetoTail && static_cast<double>(kmax) >= m.tail_exponent)
        throw DomainError("moment does not exist");
    if (m.kind == ModelKind::GaussianUnit) {
        std::vector<double> k(static_cast<std::size_t>(kmax) + 1, 0.0);
        if (kmax >= 2) k[2] = 1.0;
        return k;
    }
    double mean = lattice_mean(m);
    std::vector<double> mu(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (std::size_t i = 0; i < m.mass.size(); ++i) {
        double d = m.point(m.lo + static_cast<std::int64_t>(i)) - mean, p = 1.0;
        for (int j = 0; j <= kmax; ++j) {
            mu[j] += p * m.mass[i];
            p *= d;
        }
    }
    mu[1] = 0.0;
    return cumulants_from_central(0.0, mu, kmax);
}

double cumulant(const IncrementModel& m, int k) {
    auto kap = centered_cumulants(m, k);
    if (k == 1) return -m.drift;
    return kap[k];
}

double tail_ge(const IncrementModel& m, double x) {
    if (m.kind == ModelKind::GaussianUnit) return normal_sf(x);
    double k0 = std::ceil(x / m.span - 1e-9);
    double s = 0.0;
    for (std::int64_t k = m.hi(); k >= m.lo && static_cast<double>(k) >= k0; --k) s += m.mass_at(k);
    return s;
}

std::optional<double> log_mgf_drifted(const IncrementModel& m, double h) {
    double shift = m.pre_drifted ? 0.0 : m.drift;
    if (m.kind == ModelKind::GaussianUnit) return -h * shift + 0.5 * h * h;
    if (m.kind == ModelKind::ParetoTail && h > 0.0) return std::nullopt;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.mass.size(); ++i)
        if (m.mass[i] > 0.0) mx = std::max(mx, h * (m.point(m.lo + static_cast<std::int64_t>(i)) - shift));
    double s = 0.0;
    for (std::size_t i = 0; i < m.mass.size(); ++i)
        if (m.mass[i] > 0.0)
            s += m.mass[i] * std::exp(h * (m.point(m.lo + static_cast<std::int64_t>(i)) - shift) - mx);
    return mx + std::log(s);
}

double effective_shift(const IncrementModel& m, double a) {
    if (m.pre_drifted) {
        if (std::fabs(a - m.drift) > 1e-12)
            throw DomainError("p-biased model carries its own drift; pass the same a");
        return 0.0;
    }
    return a;
}

RationalShift lattice_shift(const IncrementModel& m, double a) {
    if (!m.is_lattice()) throw DomainError("exact computation needs a lattice model");
    double r = effective_shift(m, a) / m.span;
    if (r < 0.0) throw DomainError("negative drift");
    if (r == 0.0) return {0, 1};
    // Continued-fraction convergents until the ratio is reproduced.
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = r;
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(x);
        auto ai = static_cast<std::int64_t>(fl);
        std::int64_t p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > 1000000) break;
        if (std::fabs(static_cast<double>(p2) / static_cast<double>(q2) - r) <= 1e-12 * std::max(1.0, r))
            return {p2, q2};
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double frac = x - fl;
        if (frac <= 0.0) break;
        x = 1.0 / frac;
    }
    throw DomainError("drift is not a rational multiple of the lattice span");
}

}  // namespace ladder
