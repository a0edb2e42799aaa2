#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ladder/increments.hpp"

namespace ladder {

enum class Route { dp, spitzer, bruteforce, montecarlo, rational };
const char* route_name(Route r);

struct Provenance {
    // Mass removed by the upper-support cut (relative threshold below).
    double truncated_mass = 0.0;
    // Largest working grid width seen.
    std::size_t max_width = 0;
    bool fft = false;
    std::string kernel;
    // Sum over killed mass of the value S_tau; with killed_mass this gives
    // E[S_tau; tau <= n].
    double killed_mass = 0.0;
    double killed_first_moment = 0.0;
};

// P(tau > j) for j = 0..n with tau = min{k >= 1 : S_k < 0}.
struct LadderTailTable {
    std::vector<double> probs;
    Route route = Route::dp;
    std::string model;
    std::uint64_t model_hash = 0;
    double drift = 0.0;
    Provenance provenance;
};

std::uint64_t model_hash(const IncrementModel& m);

struct DpOptions {
    // Upper cut relative to the current survival mass; 0 disables it. The cut
    // drops exactly the mass that survives longest, so its relative effect
    // grows with n.
    double truncation = 0.0;
    std::size_t max_width = std::size_t{1} << 26;
    std::size_t fft_threshold = std::size_t{1} << 18;
};

LadderTailTable survival_dp(const IncrementModel& m, double a, std::int64_t n, const DpOptions& opt = {});

// Element k is P(S_k >= 0) for k = 0..n (element 0 is 1).
std::vector<double> marginal_nonneg_probs(const IncrementModel& m, double a, std::int64_t n,
                                          const DpOptions& opt = {});

// Uses marginals[1..n]; marginals[0] is ignored.
LadderTailTable spitzer_recurrence(const std::vector<double>& marginals);

double genf_check(const LadderTailTable& table, const std::vector<double>& marginals, std::int64_t m);

LadderTailTable enumerate_bruteforce(const IncrementModel& m, double a, std::int64_t n);

// Law of the zero-drift sum S_n on the lattice.
struct LatticePmf {
    std::int64_t lo = 0;
    double span = 1.0;
    std::vector<double> mass;
    // Bound on the L1 round-off introduced by FFT steps; tail sums below it
    // carry no information.
    double noise_floor = 0.0;
    std::int64_t hi() const { return lo + static_cast<std::int64_t>(mass.size()) - 1; }
    // P(S_n >= k * span).
    double tail_ge_index(std::int64_t k) const;
};
LatticePmf sum_distribution(const IncrementModel& m, std::int64_t n, const DpOptions& opt = {});

// P(tau_+ > j) for j = 0..n with tau_+ = min{k >= 1 : S_k >= 0}.
std::vector<double> ascending_survival(const IncrementModel& m, double a, std::int64_t n,
                                       const DpOptions& opt = {});

struct ExpectedTau {
    double value = 0.0;
    double partial_sum = 0.0;
    double tail_estimate = 0.0;
    std::int64_t horizon = 0;
    // E[S_tau; tau <= horizon] from the killed mass.
    double overshoot_mean = 0.0;
    std::string method;
};

// E tau = sum_j P(tau > j) from the DP table, with the remainder estimated
// geometrically (light tails) or by E tau * sum_{j>N} P(X >= j a) (heavy tails).
ExpectedTau expected_tau(const IncrementModel& m, double a, std::int64_t max_horizon = 400000,
                         double tol = 1e-13);

}  // namespace ladder
