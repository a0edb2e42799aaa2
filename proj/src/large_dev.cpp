#include "ladder/large_dev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "ladder/error.hpp"
#include "ladder/limit_laws.hpp"
#include "ladder/special.hpp"
#include "ladder/stable.hpp"

namespace ladder {
namespace {

using Poly = std::vector<double>;

Poly mul(const Poly& a, const Poly& b, std::size_t deg) {
    Poly r(deg + 1, 0.0);
    for (std::size_t i = 0; i < a.size() && i <= deg; ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size() && i + j <= deg; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

// Coefficients of the inverse h(x) of x = K'(h) up to degree deg.
Poly saddle_series(const std::vector<double>& g, std::size_t deg) {
    Poly h(deg + 1, 0.0);
    h[1] = 1.0;
    for (std::size_t it = 0; it < deg; ++it) {
        Poly next(deg + 1, 0.0);
        next[1] = 1.0;
        Poly pw = h;  // h^{k-1} for k = 2 first
        double fact = 1.0;
        for (std::size_t k = 3; k < g.size(); ++k) {
            pw = mul(pw, h, deg);
            fact *= static_cast<double>(k - 1);
            for (std::size_t j = 0; j <= deg; ++j) next[j] -= g[k] * pw[j] / fact;
        }
        h.swap(next);
    }
    return h;
}

double base_sigma(const IncrementModel& m) { return std::sqrt(variance(m)); }

double series_lambda(const IncrementModel& model, double x, CorrectionOrder order) {
    if (order.kind == CorrectionOrder::Kind::None) return 0.0;
    return cramer_partial_sum(cramer_coefficients(model, order.m), x);
}

}  // namespace

CramerCoefficients cramer_coefficients(const IncrementModel& model, int m) {
    if (m < 0) throw DomainError("Cramer order must be nonnegative");
    CramerCoefficients c;
    c.m = m;
    auto kap = centered_cumulants(model, m + 3);
    c.scale = std::sqrt(kap[2]);
    c.cumulants.assign(kap.size(), 0.0);
    for (std::size_t k = 2; k < kap.size(); ++k) c.cumulants[k] = kap[k] / std::pow(c.scale, static_cast<double>(k));
    auto deg = static_cast<std::size_t>(m + 2);
    Poly h = saddle_series(c.cumulants, deg);
    // Lambda*(x) = int_0^x h, lambda_i = -[x^{i+3}] Lambda*.
    c.lambdas.resize(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) c.lambdas[i] = -h[static_cast<std::size_t>(i) + 2] / static_cast<double>(i + 3);
    return c;
}

double cramer_partial_sum(const CramerCoefficients& c, double x) {
    double s = 0.0;
    for (std::size_t j = c.lambdas.size(); j-- > 0;) s = s * x + c.lambdas[j];
    return s;
}

RatePair rate_xi(const IncrementModel& model, double a, CorrectionOrder order) {
    if (!(a > 0.0)) throw DomainError("rate_xi needs a > 0");
    if (order.kind == CorrectionOrder::Kind::Full) {
        if (model.kind == ModelKind::GaussianUnit) return {a, 0.5 * a * a};
        IncrementModel d = model.pre_drifted ? model : with_drift(model, a);
        if (!log_mgf_drifted(d, 1e-3)) throw DomainError("MGF does not exist; use the series mode");
        const double shift = d.pre_drifted ? 0.0 : a;
        // Derivative of the log-MGF: mean of X - a under the tilt.
        auto f = [&](double h) {
            double mx = -1e300;
            for (std::size_t i = 0; i < d.mass.size(); ++i)
                if (d.mass[i] > 0.0) mx = std::max(mx, h * d.point(d.lo + static_cast<std::int64_t>(i)));
            double s = 0.0, w = 0.0;
            for (std::size_t i = 0; i < d.mass.size(); ++i) {
                if (d.mass[i] <= 0.0) continue;
                double x = d.point(d.lo + static_cast<std::int64_t>(i));
                double e = d.mass[i] * std::exp(h * x - mx);
                s += e * x;
                w += e;
            }
            return s / w - shift;
        };
        if (!(f(0.0) < 0.0)) throw DomainError("drifted law has nonnegative mean");
        double hi = 1.0;
        int guard = 0;
        while (f(hi) <= 0.0) {
            hi *= 2.0;
            if (++guard > 60) throw DomainError("no positive root of the saddle equation");
        }
        boost::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), it);
        double h0 = 0.5 * (r.first + r.second);
        return {h0, -*log_mgf_drifted(d, h0)};
    }
    double sigma = model.kind == ModelKind::GaussianUnit ? 1.0 : base_sigma(model);
    double x = a / sigma;
    RatePair p;
    if (order.kind == CorrectionOrder::Kind::None) {
        p.xi = 0.5 * x * x;
        p.h0 = x / sigma;
        return p;
    }
    auto c = cramer_coefficients(model, order.m);
    p.xi = 0.5 * x * x - x * x * x * cramer_partial_sum(c, x);
    Poly h = saddle_series(c.cumulants, static_cast<std::size_t>(order.m) + 2);
    double hx = 0.0;
    for (std::size_t j = h.size(); j-- > 0;) hx = hx * x + h[j];
    p.h0 = hx / sigma;
    return p;
}

double ld_normal_predict(double a, std::int64_t n, double etau, const IncrementModel& model, CorrectionOrder order) {
    if (!(a > 0.0) || n < 1) throw DomainError("ld_normal_predict needs a > 0 and n >= 1");
    double sigma = model.kind == ModelKind::GaussianUnit ? 1.0 : base_sigma(model);
    double x = a / sigma;
    double nn = static_cast<double>(n);
    double expo;
    if (order.kind == CorrectionOrder::Kind::Full) {
        if (model.kind == ModelKind::GaussianUnit) {
            expo = 0.0;
        } else {
            RatePair r = rate_xi(model, a, order);
            expo = nn * (0.5 * x * x - r.xi);
        }
    } else {
        expo = nn * x * x * x * series_lambda(model, x, order);
    }
    // Phibar underflows long before the product does.
    double log_phibar = std::log(normal_sf(std::sqrt(nn) * x));
    if (!std::isfinite(log_phibar)) {
        double z = std::sqrt(nn) * x;
        log_phibar = -0.5 * z * z - std::log(z * std::sqrt(2.0 * std::numbers::pi));
    }
    return 2.0 * etau / nn * std::exp(log_phibar + expo);
}

double ld_exponential_predict(double a, std::int64_t n, double e_exp_xi_tau, double xi) {
    double nn = static_cast<double>(n);
    return (e_exp_xi_tau - 1.0) / std::expm1(xi) * std::pow(nn, -1.5) * std::exp(-nn * xi) /
           (a * std::sqrt(2.0 * std::numbers::pi));
}

double truncated_exponential_moment(const LadderTailTable& t, double xi) {
    double s = 0.0;
    for (std::size_t j = 1; j < t.probs.size(); ++j)
        s += std::exp(xi * static_cast<double>(j)) * (t.probs[j - 1] - t.probs[j]);
    return s;
}

double ld_heavy_predict(double a, std::int64_t n, double etau, const IncrementModel& model) {
    if (!(a > 0.0) || n < 1) throw DomainError("ld_heavy_predict needs a > 0 and n >= 1");
    return etau * tail_ge(model, static_cast<double>(n) * a);
}

double fuk_nagaev_bound(const IncrementModel& model, double x, std::int64_t n, double C) {
    if (!(x > 0.0) || n < 1) throw DomainError("fuk_nagaev_bound needs x > 0 and n >= 1");
    IncrementModel base = model.pre_drifted ? zero_drift_counterpart(model) : model;
    double nn = static_cast<double>(n);
    double q = nn * truncated_second_moment(base, x) / (x * x);
    return nn * tail_ge(base, x / 3.0) + C * q * q;
}

FnCalibration calibrate_fuk_nagaev(const IncrementModel& model, const std::vector<std::int64_t>& ns) {
    IncrementModel base = model.pre_drifted ? zero_drift_counterpart(model) : with_drift(model, 0.0);
    if (!base.is_lattice()) throw DomainError("calibration needs a lattice model");
    FnCalibration cal;
    for (std::int64_t n : ns) {
        LatticePmf pmf = sum_distribution(base, n);
        double cn = norming_c(base, static_cast<double>(n));
        auto k0 = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(cn / base.span - 1e-9)));
        std::int64_t kmax = pmf.hi();
        std::int64_t stride = std::max<std::int64_t>(1, (kmax - k0) / 400);
        for (std::int64_t k = k0; k <= kmax; k += stride) {
            double x = static_cast<double>(k) * base.span;
            double exact = pmf.tail_ge_index(k);
            if (exact <= 100.0 * pmf.noise_floor) break;
            double nn = static_cast<double>(n);
            double q = nn * truncated_second_moment(base, x) / (x * x);
            double head = nn * tail_ge(base, x / 3.0);
            ++cal.points;
            if (exact > head && q > 0.0) {
                double need = (exact - head) / (q * q);
                if (need > cal.minimal_c) {
                    cal.minimal_c = need;
                    cal.worst_n = n;
                    cal.worst_x = x;
                }
            }
        }
    }
    return cal;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::ZeroDrift: return "zero-drift";
        case Regime::Transition: return "transition";
        case Regime::LdNormal: return "ld-normal";
        case Regime::LdTail: return "ld-tail";
    }
    return "?";
}

RegimeReport regime_classify(const IncrementModel& model, double a, std::int64_t n, const RegimeOptions& opt) {
    if (!(a > 0.0) || n < 1) throw DomainError("regime_classify needs a > 0 and n >= 1");
    RegimeReport r;
    r.a = a;
    r.n = n;
    DomainInfo d = domain_of(model);
    StableParams sp = make_stable(d.alpha, d.beta);
    IncrementModel base = model.pre_drifted ? zero_drift_counterpart(model) : with_drift(model, 0.0);
    r.c_n = norming_c(base, static_cast<double>(n));
    r.u = a * static_cast<double>(n) / r.c_n;
    const double loga = std::log(std::max(1.0 / (a * a), std::exp(1.0)));
    const double nn = static_cast<double>(n);
    bool tail_zone = false;
    if (d.regularly_varying_tail && d.finite_variance) {
        double root = std::sqrt(model.tail_exponent - 2.0);
        double ratio = nn * a * a / loga;
        tail_zone = ratio >= root;
        r.unresolved_window = ratio >= 0.75 * root && ratio <= 1.5 * root;
    }
    if (r.u < kZeroDriftUpper) r.regime = Regime::ZeroDrift;
    else if (r.u <= kTransitionUpper) r.regime = Regime::Transition;
    else if (!d.finite_variance || tail_zone) r.regime = Regime::LdTail;
    else r.regime = Regime::LdNormal;
    r.assumption = model.cramer ? "moderate-deviation expansion assumed to all orders (Cramer condition)"
                                : "moderate-deviation expansion assumed with m = 0 (moments only)";

    auto zero_tail = [&] { return zero_drift_tail(model, n); };
    auto need_etau = [&] {
        if (opt.etau) {
            r.etau = *opt.etau;
            r.etau_method = "given";
        } else if (d.finite_variance && (!model.is_lattice() || a < 0.05)) {
            bool strict = model.is_lattice() && !model.pre_drifted;
            r.etau = expectation_finite_variance(model, 10000, strict)(a);
            r.etau_method = strict ? "spitzer-series predictor (strict)" : "spitzer-series predictor";
        } else {
            auto e = expected_tau(model.pre_drifted ? model : with_drift(model, a), a);
            r.etau = e.value;
            r.etau_method = e.method;
        }
    };
    CorrectionOrder order = model.cramer ? CorrectionOrder::full() : CorrectionOrder::terms(0);
    switch (r.regime) {
        case Regime::ZeroDrift: {
            r.predictor = "P(tau0 > n)";
            r.value = zero_tail();
            r.competitor = "P(tau0 > n) (1 - F(u))";
            r.competitor_value = r.value * limit_cdf(sp)(r.u);
            break;
        }
        case Regime::Transition: {
            double z = zero_tail();
            r.predictor = "P(tau0 > n) (1 - F(u))";
            r.value = z * limit_cdf(sp)(r.u);
            r.competitor = "P(tau0 > n)";
            r.competitor_value = z;
            break;
        }
        case Regime::LdNormal: {
            need_etau();
            r.predictor = "2 E tau n^-1 Phibar(sqrt(n) a) exp(n a^3 lambda(a))";
            r.value = ld_normal_predict(a, n, r.etau, model, order);
            if (d.regularly_varying_tail) {
                r.competitor = "E tau P(X >= n a)";
                r.competitor_value = ld_heavy_predict(a, n, r.etau, model);
            } else {
                r.competitor = "P(tau0 > n) (1 - F(u))";
                r.competitor_value = zero_tail() * limit_cdf(sp)(r.u);
            }
            break;
        }
        case Regime::LdTail: {
            need_etau();
            r.predictor = "E tau P(X >= n a)";
            r.value = ld_heavy_predict(a, n, r.etau, model);
            if (d.finite_variance) {
                r.competitor = "2 E tau n^-1 Phibar(sqrt(n) a) exp(n a^3 lambda(a))";
                r.competitor_value = ld_normal_predict(a, n, r.etau, model, CorrectionOrder::none());
            } else {
                r.competitor = "P(tau0 > n) (1 - F(u))";
                r.competitor_value = 0.0;
            }
            break;
        }
    }
    if (opt.experimental_conjecture && d.finite_variance && d.regularly_varying_tail && r.regime != Regime::ZeroDrift) {
        if (r.etau == 0.0) need_etau();
        double sig = std::sqrt(variance(base));
        r.conjecture = 2.0 * r.etau / nn * normal_sf(std::sqrt(nn) * a / sig) +
                       r.etau * tail_ge(model, std::sqrt(nn) + nn * a);
    }
    return r;
}

}  // namespace ladder
