#pragma once

#include "ladder/rng.hpp"

namespace ladder {

// Strictly stable law with E exp(itY) = exp{-|t|^a (1 - i b sgn(t) tan(pi a / 2))}.
struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double rho = 0.5;
};

double positivity_rho(double alpha, double beta);
StableParams make_stable(double alpha, double beta);

double stable_density(const StableParams& p, double x);
double stable_tail(const StableParams& p, double x);
// P(Y(t) > x) computed from the time-t characteristic function directly.
double stable_tail_at_time(const StableParams& p, double t, double x);
double sample_stable(const StableParams& p, Rng& rng);

// The two evaluation routes, exposed for cross-checks. The oscillatory
// transform is used for |x| <= kOscillatoryLimit, the Zolotarev integral
// beyond.
inline constexpr double kOscillatoryLimit = 8.0;
double stable_density_transform(const StableParams& p, double x);
double stable_tail_transform(const StableParams& p, double x, double t = 1.0);
double stable_density_zolotarev(const StableParams& p, double x);
double stable_tail_zolotarev(const StableParams& p, double x);

// Scale s with S_n / c_n -> s * Y when c_n is defined through the truncated
// second moment: s^a = -(2-a) Gamma(-a) cos(pi a / 2), and s = 1/sqrt(2) at a = 2.
double limit_scale(double alpha);
double limit_tail(const StableParams& p, double x);
double limit_density(const StableParams& p, double x);

}  // namespace ladder
