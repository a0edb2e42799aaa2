#include "ladder/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ladder/error.hpp"
#include "ladder/special.hpp"

namespace ladder {
namespace {

using std::numbers::pi;

void check(double alpha, double beta) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (1,2]");
    if (!(std::fabs(beta) <= 1.0)) throw DomainError("beta must lie in [-1,1]");
}

double skew(const StableParams& p) { return p.beta * std::tan(pi * p.alpha / 2.0); }

boost::math::quadrature::tanh_sinh<double>& ts() {
    thread_local boost::math::quadrature::tanh_sinh<double> q(12);
    return q;
}

// Integral of f over [0, T] split into panels short enough to resolve the
// oscillation; the first panel carries the t^alpha endpoint behaviour.
template <class F>
double panel_integral(F f, double T, double freq) {
    double w = std::min(0.5, 2.0 / (freq + 1.0));
    double total = ts().integrate(f, 0.0, w, 1e-15);
    using G = boost::math::quadrature::gauss<double, 30>;
    for (double a = w; a < T; a += w) total += G::integrate(f, a, std::min(a + w, T));
    return total;
}

struct Zolo {
    double alpha, theta0, c0;
    Zolo(double alpha_, double beta) : alpha(alpha_) {
        theta0 = std::atan(beta * std::tan(pi * alpha / 2.0)) / alpha;
        c0 = std::pow(std::cos(alpha * theta0), 1.0 / (alpha - 1.0));
    }
    double V(double th) const {
        double s = std::sin(alpha * (theta0 + th));
        if (s <= 0.0) return std::numeric_limits<double>::infinity();
        double c = std::cos(th);
        if (c <= 0.0) return 0.0;
        return c0 * std::pow(c / s, alpha / (alpha - 1.0)) * std::cos(alpha * theta0 + (alpha - 1.0) * th) / c;
    }
    // Point where c * V = 1, used to split the peaked integrand.
    double split(double c) const {
        double lo = -theta0, hi = pi / 2.0;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (c * V(mid) > 1.0) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    }
    template <class G>
    double integrate(G g, double c) const {
        double a = -theta0, b = pi / 2.0, m = split(c);
        double r = 0.0;
        if (m > a + 1e-14) r += ts().integrate(g, a, m, 1e-14);
        if (m < b - 1e-14) r += ts().integrate(g, m, b, 1e-14);
        return r;
    }
};

// Positive-argument pieces of the Zolotarev representation.
double zolo_density_pos(double alpha, double beta, double y) {
    Zolo z(alpha, beta);
    double c = std::pow(y, alpha / (alpha - 1.0));
    auto g = [&](double th) {
        double v = z.V(th);
        if (!std::isfinite(v)) return 0.0;
        return v * std::exp(-c * v);
    };
    return alpha * std::pow(y, 1.0 / (alpha - 1.0)) / (pi * (alpha - 1.0)) * z.integrate(g, c);
}

double zolo_tail_pos(double alpha, double beta, double y) {
    Zolo z(alpha, beta);
    double c = std::pow(y, alpha / (alpha - 1.0));
    auto g = [&](double th) {
        double v = z.V(th);
        if (!std::isfinite(v)) return 0.0;
        return std::exp(-c * v);
    };
    return z.integrate(g, c) / pi;
}

}  // namespace

double positivity_rho(double alpha, double beta) {
    check(alpha, beta);
    if (alpha == 2.0) return 0.5;
    return 0.5 + std::atan(beta * std::tan(pi * alpha / 2.0)) / (pi * alpha);
}

StableParams make_stable(double alpha, double beta) {
    check(alpha, beta);
    if (alpha == 2.0) beta = 0.0;
    return StableParams{alpha, beta, positivity_rho(alpha, beta)};
}

double stable_density_transform(const StableParams& p, double x) {
    check(p.alpha, p.beta);
    double z = skew(p);
    double T = std::pow(40.0, 1.0 / p.alpha);
    double freq = std::fabs(z) * p.alpha * std::pow(T, p.alpha - 1.0) + std::fabs(x);
    auto f = [&](double t) {
        double ta = std::pow(t, p.alpha);
        return std::exp(-ta) * std::cos(z * ta - t * x);
    };
    double v = panel_integral(f, T, freq) / pi;
    if (!std::isfinite(v)) throw ConvergenceError("stable density quadrature failed");
    return std::max(v, 0.0);
}

double stable_tail_transform(const StableParams& p, double x, double t) {
    check(p.alpha, p.beta);
    double z = skew(p);
    double T = std::pow(40.0 / t, 1.0 / p.alpha);
    double freq = std::fabs(z) * p.alpha * t * std::pow(T, p.alpha - 1.0) + std::fabs(x);
    auto f = [&](double s) {
        if (s == 0.0) return 0.0;
        double ta = t * std::pow(s, p.alpha);
        return std::exp(-ta) * std::sin(z * ta - s * x) / s;
    };
    double v = 0.5 + panel_integral(f, T, freq) / pi;
    if (!std::isfinite(v)) throw ConvergenceError("stable tail quadrature failed");
    return std::clamp(v, 0.0, 1.0);
}

double stable_density_zolotarev(const StableParams& p, double x) {
    check(p.alpha, p.beta);
    if (x == 0.0) {
        double z = skew(p);
        double th0 = std::atan(z) / p.alpha;
        return std::tgamma(1.0 + 1.0 / p.alpha) * std::cos(th0) / (pi * std::pow(1.0 + z * z, 1.0 / (2.0 * p.alpha)));
    }
    if (x > 0.0) return zolo_density_pos(p.alpha, p.beta, x);
    return zolo_density_pos(p.alpha, -p.beta, -x);
}

double stable_tail_zolotarev(const StableParams& p, double x) {
    check(p.alpha, p.beta);
    if (x == 0.0) return p.rho;
    if (x > 0.0) return zolo_tail_pos(p.alpha, p.beta, x);
    return 1.0 - zolo_tail_pos(p.alpha, -p.beta, -x);
}

double stable_density(const StableParams& p, double x) {
    if (p.alpha == 2.0) return std::exp(-x * x / 4.0) / std::sqrt(4.0 * pi);
    if (std::fabs(x) <= kOscillatoryLimit) return stable_density_transform(p, x);
    return stable_density_zolotarev(p, x);
}

double stable_tail(const StableParams& p, double x) {
    if (p.alpha == 2.0) return normal_sf(x / std::numbers::sqrt2);
    if (x == 0.0) return p.rho;
    if (std::fabs(x) <= kOscillatoryLimit) return stable_tail_transform(p, x);
    return stable_tail_zolotarev(p, x);
}

double stable_tail_at_time(const StableParams& p, double t, double x) {
    if (!(t > 0.0)) throw DomainError("time must be positive");
    if (p.alpha == 2.0) return normal_sf(x / std::sqrt(2.0 * t));
    return stable_tail_transform(p, x, t);
}

double sample_stable(const StableParams& p, Rng& rng) {
    double a = p.alpha;
    double tz = p.beta * std::tan(pi * a / 2.0);
    double B = std::atan(tz) / a;
    double S = std::pow(1.0 + tz * tz, 1.0 / (2.0 * a));
    double V = pi * (rng.uniform() - 0.5);
    double W = rng.exponential();
    double num = std::sin(a * (V + B)) / std::pow(std::cos(V), 1.0 / a);
    return S * num * std::pow(std::cos(V - a * (V + B)) / W, (1.0 - a) / a);
}

double limit_scale(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (1,2]");
    if (alpha == 2.0) return 1.0 / std::numbers::sqrt2;
    double s = -(2.0 - alpha) * std::tgamma(-alpha) * std::cos(pi * alpha / 2.0);
    return std::pow(s, 1.0 / alpha);
}

double limit_tail(const StableParams& p, double x) {
    if (p.alpha == 2.0) return normal_sf(x);
    return stable_tail(p, x / limit_scale(p.alpha));
}

double limit_density(const StableParams& p, double x) {
    if (p.alpha == 2.0) return normal_pdf(x);
    double s = limit_scale(p.alpha);
    return stable_density(p, x / s) / s;
}

}  // namespace ladder
