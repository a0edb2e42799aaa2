#include "ladder/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ladder/error.hpp"
#include "ladder/ladder_exact.hpp"
#include "ladder/special.hpp"

namespace ladder {
namespace {

using std::numbers::pi;

boost::math::quadrature::tanh_sinh<double>& ts() {
    thread_local boost::math::quadrature::tanh_sinh<double> q(15);
    return q;
}

boost::math::quadrature::exp_sinh<double>& es() {
    thread_local boost::math::quadrature::exp_sinh<double> q(12);
    return q;
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw ConvergenceError(what);
    return v;
}

// P(Z > t^{1 - 1/alpha}) with Z the normalized limit.
double p_of_t(const StableParams& p, double t) {
    if (t <= 0.0) return p.rho;
    return limit_tail(p, std::pow(t, 1.0 - 1.0 / p.alpha));
}

double stehfest_weight(int k, int N) {
    int h = N / 2;
    double s = 0.0;
    for (int j = (k + 1) / 2; j <= std::min(k, h); ++j) {
        double num = std::pow(static_cast<double>(j), h) * std::tgamma(2.0 * j + 1.0);
        double den = std::tgamma(static_cast<double>(h - j) + 1.0) * std::tgamma(j + 1.0) * std::tgamma(static_cast<double>(j)) *
                     std::tgamma(static_cast<double>(k - j) + 1.0) * std::tgamma(2.0 * j - k + 1.0);
        s += num / den;
    }
    return ((k + h) % 2 == 0 ? 1.0 : -1.0) * s;
}

// log of the right side of the Laplace identity with the closed constant.
double log_laplace_rhs(const StableParams& p, double lambda) {
    auto f = [&](double t) {
        if (t <= 0.0) return 0.0;
        return (p_of_t(p, t) * std::exp(-lambda * t) - p.rho * std::exp(-t)) / t;
    };
    double a = ts().integrate(f, 0.0, 1.0, 1e-13);
    double b = es().integrate([&](double s) { return f(1.0 + s); }, 1e-13);
    return std::lgamma(p.rho) + a + b;
}

double invert_with(const StableParams& p, double u, int N, double log_shift) {
    double x = std::pow(u, p.alpha / (p.alpha - 1.0));
    double ln2x = std::log(2.0) / x;
    double s = 0.0;
    for (int k = 1; k <= N; ++k) s += stehfest_weight(k, N) * std::exp(log_laplace_rhs(p, k * ln2x) + log_shift);
    return ln2x * s * std::pow(x, 1.0 - p.rho);
}

}  // namespace

const char* correction_route_name(CorrectionRoute r) {
    switch (r) {
        case CorrectionRoute::closed_brownian: return "closed_brownian";
        case CorrectionRoute::closed_spectrally_positive: return "closed_spectrally_positive";
        case CorrectionRoute::laplace_inversion: return "laplace_inversion";
    }
    return "?";
}

double brownian_correction(double u) {
    if (!(u >= 0.0)) throw DomainError("brownian_correction needs u >= 0");
    if (u < 2.0) return std::exp(-0.5 * u * u) - u * std::sqrt(2.0 * pi) * normal_sf(u);
    // 1 - u R(u) with the Mills ratio R as a continued fraction; the
    // difference is formed inside the fraction so nothing cancels.
    double r = 0.0;
    for (int k = 400; k >= 2; --k) r = static_cast<double>(k) / (u + r);
    r = 1.0 / (u + r);
    double mills = 1.0 / (u + r);
    return std::exp(-0.5 * u * u) * mills * r;
}

double spectrally_positive_correction(double alpha, double u) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("spectrally positive correction needs alpha in (1,2)");
    if (!(u >= 0.0)) throw DomainError("spectrally positive correction needs u >= 0");
    if (u == 0.0) return 1.0;
    StableParams p = make_stable(alpha, 1.0);
    double w = u / limit_scale(alpha);
    double g0 = stable_density_zolotarev(p, 0.0);
    double k = 1.0 / (alpha - 1.0);
    // v = w e^s turns the prefactor and v^{-alpha/(alpha-1)} into e^{-s/(alpha-1)}.
    auto f = [&](double s) {
        double e = std::exp(-k * s);
        if (e < 1e-300) return 0.0;
        return e * stable_density(p, w * std::exp(s));
    };
    double I = es().integrate(f, 1e-12);
    return checked(std::clamp(k * I / g0, 0.0, 1.0), "spectrally positive quadrature failed");
}

double laplace_constant(const StableParams& p) { return std::exp(log_laplace_rhs(p, 0.0)); }

double laplace_rhs(const StableParams& p, double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("laplace_rhs needs lambda >= 0");
    return checked(std::exp(log_laplace_rhs(p, lambda)), "laplace_rhs quadrature failed");
}

double laplace_lhs(const std::function<double(double)>& correction, const StableParams& p, double lambda) {
    // x = s^{1/rho} absorbs the x^{rho-1} factor.
    double e = (1.0 - 1.0 / p.alpha) / p.rho;
    auto f = [&](double s) {
        if (s <= 0.0) return correction(0.0);
        double x = std::pow(s, 1.0 / p.rho);
        double w = std::exp(-lambda * x);
        if (w == 0.0) return 0.0;
        return w * correction(std::pow(s, e));
    };
    double v = ts().integrate(f, 0.0, 1.0, 1e-14) + es().integrate([&](double s) { return f(1.0 + s); }, 1e-14);
    return checked(v / p.rho, "laplace_lhs quadrature failed");
}

InversionResult laplace_inversion(const StableParams& p, double u, int terms) {
    if (!(u > 0.0)) throw DomainError("laplace_inversion needs u > 0");
    if (terms < 4 || terms % 2 != 0 || terms > 20) throw DomainError("Stehfest terms must be even in [4,20]");
    InversionResult r;
    r.value = invert_with(p, u, terms, 0.0);
    r.spread = std::fabs(r.value - invert_with(p, u, terms - 2, 0.0));
    return r;
}

double laplace_calibrated_constant(const StableParams& p) {
    double v = invert_with(p, 1e-3, 14, 0.0);
    return laplace_constant(p) / v;
}

LimitCdf limit_cdf(const StableParams& p) {
    LimitCdf c;
    c.params = p;
    if (p.alpha == 2.0) {
        c.route = CorrectionRoute::closed_brownian;
        c.eval = [](double u) { return brownian_correction(u); };
    } else if (p.beta == 1.0) {
        c.route = CorrectionRoute::closed_spectrally_positive;
        double a = p.alpha;
        c.eval = [a](double u) { return u <= 0.0 ? 1.0 : spectrally_positive_correction(a, u); };
    } else {
        c.route = CorrectionRoute::laplace_inversion;
        c.eval = [p](double u) { return u <= 0.0 ? 1.0 : std::clamp(laplace_inversion(p, u).value, 0.0, 1.0); };
    }
    return c;
}

double integral_equation_residual(const std::function<double(double)>& correction, const StableParams& p, double u) {
    if (!(u > 0.0)) throw DomainError("integral_equation_residual needs u > 0");
    const double e = 1.0 - 1.0 / p.alpha;
    // t = s^{1/rho}: t^{rho-1} dt = ds / rho.
    auto f = [&](double s) {
        double t = std::pow(s, 1.0 / p.rho);
        double tail = limit_tail(p, u * std::pow(std::max(0.0, 1.0 - t), e));
        return correction(u * std::pow(t, e)) * tail;
    };
    double rhs = ts().integrate(f, 0.0, 1.0, 1e-14) / p.rho;
    return std::fabs(correction(u) - rhs);
}

TransitionPrediction transition_predict(double zero_tail, const StableParams& p, double u) {
    if (!(zero_tail >= 0.0 && zero_tail <= 1.0)) throw DomainError("zero_tail must be a probability");
    if (!(u >= 0.0)) throw DomainError("u must be nonnegative");
    TransitionPrediction t;
    t.correction = u == 0.0 ? 1.0 : limit_cdf(p)(u);
    t.value = zero_tail * t.correction;
    t.use_large_deviation = u > kTransitionUpper;
    return t;
}

double moment_constant(double r, const StableParams& p) {
    if (!(r > 1.0 - p.rho && r < p.alpha)) throw DomainError("moment constant diverges");
    LimitCdf G = limit_cdf(p);
    const double e = r + p.rho - 2.0;
    const double k = 1.0 - 1.0 / p.alpha;
    // Separate objects: G itself integrates with es().
    thread_local boost::math::quadrature::tanh_sinh<double> outer_ts(15);
    thread_local boost::math::quadrature::exp_sinh<double> outer_es(12);
    // [0,1]: subtract the value 1 at the origin, whose integral is 1/(e+1).
    auto near = [&](double x) {
        if (x <= 0.0) return 0.0;
        return std::pow(x, e) * (G(std::pow(x, k)) - 1.0);
    };
    double a = outer_ts.integrate(near, 0.0, 1.0, 1e-12) + 1.0 / (e + 1.0);
    // [1,inf) in y = log x.
    auto far = [&](double y) {
        double v = G(std::exp(k * y));
        if (v == 0.0) return 0.0;
        return std::exp((e + 1.0) * y) * v;
    };
    if (p.alpha == 2.0) return checked(a + outer_es.integrate(far, 1e-12), "moment constant quadrature failed");
    // Power tail 1 - F(u) ~ c u^{-(1+alpha)}: the integrand decays like
    // e^{(r - alpha) y}, too slowly for exp_sinh near r = alpha.
    const double Y = std::log(40.0) / k;
    double b = outer_ts.integrate(far, 0.0, Y, 1e-10);
    b += far(Y) / (p.alpha - r);
    return checked(a + b, "moment constant quadrature failed");
}

SpitzerSeries spitzer_series(const IncrementModel& m, std::int64_t horizon, bool strict) {
    SpitzerSeries s;
    s.horizon = horizon;
    if (m.kind == ModelKind::GaussianUnit) return s;  // P(S_k >= 0) = 1/2 exactly
    if (horizon < 100) throw DomainError("series horizon must be at least 100");
    IncrementModel z = zero_drift_counterpart(m);
    std::vector<double> marg;
    if (strict) {
        // P(S_k > 0) = 1 - P(-S_k >= 0).
        std::vector<double> rev(z.mass.rbegin(), z.mass.rend());
        IncrementModel r = make_lattice(z.span, -z.hi(), std::move(rev));
        marg = marginal_nonneg_probs(r, 0.0, horizon);
        for (auto& v : marg) v = 1.0 - v;
    } else {
        marg = marginal_nonneg_probs(z, 0.0, horizon);
    }
    std::vector<double> terms(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (std::int64_t k = 1; k <= horizon; ++k) terms[k] = (marg[k] - 0.5) / static_cast<double>(k);
    double part = 0.0, c = 0.0;
    for (std::int64_t k = horizon; k >= 1; --k) part += terms[k];
    // Matched sums over the last decade are insensitive to lattice parity.
    double num = 0.0, den = 0.0;
    for (std::int64_t k = horizon / 10; k <= horizon; ++k) {
        num += terms[k];
        den += std::pow(static_cast<double>(k), -1.5);
    }
    c = num / den;
    s.partial = part;
    s.fitted_c = c;
    s.tail = c * 2.0 / std::sqrt(static_cast<double>(horizon) + 0.5);
    s.value = part + s.tail;
    if (std::fabs(s.tail) > 0.05) throw ConvergenceError("Spitzer series tail too large; raise the horizon");
    return s;
}

ExpectationPredictor expectation_finite_variance(const IncrementModel& m, std::int64_t horizon, bool strict) {
    if (!domain_of(m).finite_variance) throw DomainError("expectation predictor needs finite variance");
    ExpectationPredictor e;
    IncrementModel z = m.kind == ModelKind::GaussianUnit ? m : zero_drift_counterpart(m);
    e.sigma = std::sqrt(variance(z));
    e.series = spitzer_series(m, horizon, strict && m.is_lattice());
    e.constant = e.sigma / std::numbers::sqrt2 * std::exp(e.series.value);
    return e;
}

WaldRecord wald_and_ascending(const IncrementModel&, double a, double etau) {
    if (!(etau >= 1.0) || !std::isfinite(etau)) throw DomainError("E tau must be finite and >= 1");
    return WaldRecord{-a * etau, 1.0 / etau};
}

double zero_drift_tail(const IncrementModel& m, std::int64_t n) {
    if (n < 0) throw DomainError("n must be nonnegative");
    if (m.is_lattice()) return survival_dp(zero_drift_counterpart(m), 0.0, n).probs.back();
    if (n == 0) return 1.0;
    auto s = spitzer_series(m);
    return std::exp(s.value) / std::sqrt(pi * static_cast<double>(n));
}

}  // namespace ladder
