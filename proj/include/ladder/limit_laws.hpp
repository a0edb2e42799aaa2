#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ladder/increments.hpp"
#include "ladder/stable.hpp"

namespace ladder {

// Everything here is expressed through the law of lim S_n / c_n, that is
// limit_scale(alpha) * Y (standard normal when alpha = 2).

enum class CorrectionRoute { closed_brownian, closed_spectrally_positive, laplace_inversion };
const char* correction_route_name(CorrectionRoute r);

// u -> 1 - F(u).
struct LimitCdf {
    StableParams params;
    CorrectionRoute route = CorrectionRoute::closed_brownian;
    std::function<double(double)> eval;
    double operator()(double u) const { return eval(u); }
};

LimitCdf limit_cdf(const StableParams& p);

double brownian_correction(double u);
double spectrally_positive_correction(double alpha, double u);

double laplace_constant(const StableParams& p);
double laplace_rhs(const StableParams& p, double lambda);
// Left side: int_0^inf e^{-lambda x} x^{rho-1} (1 - F(x^{1-1/alpha})) dx.
double laplace_lhs(const std::function<double(double)>& correction, const StableParams& p, double lambda);

struct InversionResult {
    double value = 0.0;
    // Difference to the inversion with two fewer Stehfest terms.
    double spread = 0.0;
};
InversionResult laplace_inversion(const StableParams& p, double u, int terms = 14);
// Constant that makes the inverted function equal 1 at u = 1e-3. Diagnostic
// only; laplace_constant is the closed form used everywhere else.
double laplace_calibrated_constant(const StableParams& p);

double integral_equation_residual(const std::function<double(double)>& correction, const StableParams& p, double u);

struct TransitionPrediction {
    double value = 0.0;
    double correction = 1.0;
    bool use_large_deviation = false;
};
inline constexpr double kTransitionUpper = 3.0;
TransitionPrediction transition_predict(double zero_tail, const StableParams& p, double u);

double moment_constant(double r, const StableParams& p);

struct SpitzerSeries {
    double value = 0.0;
    double partial = 0.0;
    double tail = 0.0;
    double fitted_c = 0.0;
    std::int64_t horizon = 0;
};
// sum_k k^{-1} (P(S_k >= 0) - 1/2) at zero drift, with the remainder beyond
// the horizon fitted as c k^{-1/2} on the last decade. strict uses P(S_k > 0),
// which is the relevant limit for a lattice law shifted by a small a: there
// S_k >= k a coincides with S_k > 0 until k a reaches the span.
SpitzerSeries spitzer_series(const IncrementModel& m, std::int64_t horizon = 10000, bool strict = false);

struct ExpectationPredictor {
    double constant = 0.0;  // E tau ~ constant / a
    double sigma = 1.0;
    SpitzerSeries series;
    double operator()(double a) const { return constant / a; }
};
ExpectationPredictor expectation_finite_variance(const IncrementModel& m, std::int64_t horizon = 10000,
                                                 bool strict = false);

struct WaldRecord {
    double mean_ladder_height = 0.0;  // E S_tau
    double escape_probability = 0.0;  // P(tau_+ = infinity)
};
WaldRecord wald_and_ascending(const IncrementModel& m, double a, double etau);

// P(tau^(0) > n): exact DP for lattice laws, otherwise the zero-drift
// asymptote exp(series) / sqrt(pi n).
double zero_drift_tail(const IncrementModel& m, std::int64_t n);

}  // namespace ladder
