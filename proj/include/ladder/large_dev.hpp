#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ladder/increments.hpp"
#include "ladder/ladder_exact.hpp"

namespace ladder {

// How much of the Cramer series enters xi(a) and the Gaussian-zone predictor.
struct CorrectionOrder {
    enum class Kind { None, Terms, Full };
    Kind kind = Kind::Full;
    int m = 0;  // highest coefficient index kept when kind == Terms
    static CorrectionOrder none() { return {Kind::None, 0}; }
    static CorrectionOrder terms(int m) { return {Kind::Terms, m}; }
    static CorrectionOrder full() { return {Kind::Full, 0}; }
};

// lambda_0..lambda_m of the unit-variance centered law; scale is its standard
// deviation. lambda(x) = sum_j lambda_j x^j.
struct CramerCoefficients {
    int m = 0;
    std::vector<double> lambdas;
    std::vector<double> cumulants;  // standardized, index k = order
    double scale = 1.0;
};

CramerCoefficients cramer_coefficients(const IncrementModel& model, int m);
double cramer_partial_sum(const CramerCoefficients& c, double x);

struct RatePair {
    double h0 = 0.0;
    double xi = 0.0;
};
RatePair rate_xi(const IncrementModel& model, double a, CorrectionOrder order);

// 2 E tau n^{-1} Phibar(sqrt(n) a / sigma) exp{n (a/sigma)^3 lambda(a/sigma)}.
double ld_normal_predict(double a, std::int64_t n, double etau, const IncrementModel& model, CorrectionOrder order);
// (E e^{xi tau} - 1)/(e^xi - 1) n^{-3/2} e^{-n xi} / (a sqrt(2 pi)).
double ld_exponential_predict(double a, std::int64_t n, double e_exp_xi_tau, double xi);
// E[e^{xi tau}; tau <= n] from a survival table.
double truncated_exponential_moment(const LadderTailTable& t, double xi);
double ld_heavy_predict(double a, std::int64_t n, double etau, const IncrementModel& model);

inline constexpr double kFukNagaevDefaultC = 8.0;
double fuk_nagaev_bound(const IncrementModel& model, double x, std::int64_t n, double C = kFukNagaevDefaultC);

struct FnCalibration {
    double minimal_c = 0.0;
    std::int64_t worst_n = 0;
    double worst_x = 0.0;
    std::size_t points = 0;
};
// Smallest C for which the bound dominates exact marginals on the grid
// x = k * span >= c_n, n in ns.
FnCalibration calibrate_fuk_nagaev(const IncrementModel& model, const std::vector<std::int64_t>& ns);

enum class Regime { ZeroDrift, Transition, LdNormal, LdTail };
const char* regime_name(Regime r);

inline constexpr double kZeroDriftUpper = 0.1;

struct RegimeOptions {
    std::optional<double> etau;  // computed when absent
    bool experimental_conjecture = false;
};

struct RegimeReport {
    double a = 0.0;
    std::int64_t n = 0;
    double c_n = 0.0;
    double u = 0.0;
    Regime regime = Regime::ZeroDrift;
    std::string predictor;
    double value = 0.0;
    std::string competitor;
    double competitor_value = 0.0;
    bool unresolved_window = false;
    std::string assumption;
    double etau = 0.0;
    std::string etau_method;
    std::optional<double> conjecture;
};

RegimeReport regime_classify(const IncrementModel& model, double a, std::int64_t n, const RegimeOptions& opt = {});

}  // namespace ladder
