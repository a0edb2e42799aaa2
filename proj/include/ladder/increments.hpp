#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ladder {

enum class ModelKind { Lattice, GaussianUnit, ParetoTail };

// Zero-mean increment law X together with the drift a of X - a.
//
// Lattice and ParetoTail laws live on span * Z with a dense mass table
// starting at index lo. ParetoTail is a lattice discretization with
// P(X >= k*span) = scale * k^-t up to x_max and a single atom on the left
// that centers the law. The p-biased walk (steps +-1, P(+1) = (1-a)/2) is
// stored already drifted: pre_drifted is set and the DP applies no shift.
struct IncrementModel {
    ModelKind kind = ModelKind::Lattice;
    std::string name;
    double span = 1.0;
    std::int64_t lo = 0;
    std::vector<double> mass;
    double tail_exponent = 0.0;
    double tail_scale = 0.0;
    double drift = 0.0;
    bool pre_drifted = false;
    bool cramer = false;

    bool is_lattice() const { return kind != ModelKind::GaussianUnit; }
    std::int64_t hi() const { return lo + static_cast<std::int64_t>(mass.size()) - 1; }
    double point(std::int64_t k) const { return static_cast<double>(k) * span; }
    double mass_at(std::int64_t k) const {
        if (k < lo || k > hi()) return 0.0;
        return mass[static_cast<std::size_t>(k - lo)];
    }
};

// Constructors. Lattice tables are indexed from lo; masses are renormalized
// only if they already sum to 1 within 1e-12, otherwise construction fails.
IncrementModel make_lattice(double span, std::int64_t lo, std::vector<double> mass,
                            double drift = 0.0, std::string name = "lattice");
IncrementModel make_symmetric_pm1(double drift = 0.0);
IncrementModel make_pbiased(double a);
IncrementModel make_gaussian_unit(double drift = 0.0);
IncrementModel make_pareto(double t, double scale, std::int64_t x_max, double span = 1.0,
                           double drift = 0.0);
// Symmetric span-h discretization of N(0,1) on [-cutoff, cutoff].
IncrementModel discretize_gaussian(double span, double cutoff = 8.5, double drift = 0.0);

IncrementModel with_drift(const IncrementModel& m, double a);
// Same base law at drift 0; the p-biased walk maps to the symmetric +-1 walk.
IncrementModel zero_drift_counterpart(const IncrementModel& m);

// Stable domain of the base law: (alpha, beta) with alpha = min(t, 2).
struct DomainInfo {
    double alpha = 2.0;
    double beta = 0.0;
    bool finite_variance = true;
    bool regularly_varying_tail = false;
};
DomainInfo domain_of(const IncrementModel& m);

void validate(const IncrementModel& m);

double truncated_second_moment(const IncrementModel& m, double u);
double norming_c(const IncrementModel& m, double n);
std::int64_t boundary_n_a(const IncrementModel& m, double a);

// k-th cumulant of the drifted law (X - a, or the p-biased step).
double cumulant(const IncrementModel& m, int k);
// Cumulants of the centered law, kappa_1 = 0.
std::vector<double> centered_cumulants(const IncrementModel& m, int kmax);
double variance(const IncrementModel& m);

// P(X >= x) and P(X - a >= 0) style helpers on the base (undrifted) law.
double tail_ge(const IncrementModel& m, double x);
// log E exp(h (X - a)) for the drifted law; nullopt outside the domain.
std::optional<double> log_mgf_drifted(const IncrementModel& m, double h);

// Exact rational a/span = p/q used by the DP; throws for irrational ratios.
struct RationalShift {
    std::int64_t p = 0;
    std::int64_t q = 1;
};
RationalShift lattice_shift(const IncrementModel& m, double a);

// Drift argument actually applied to the lattice sums.
double effective_shift(const IncrementModel& m, double a);

}  // namespace ladder
