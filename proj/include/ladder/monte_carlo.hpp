#pragma once

#include <cstdint>
#include <string>

#include "ladder/increments.hpp"

namespace ladder {

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t paths = 0;
    std::uint64_t seed = 0;
    std::int64_t cap = 0;
    double tilt = 0.0;
    double censored_fraction = 0.0;
    std::string warning;
};

// Path p uses the stream Rng(seed, p); paths are grouped in fixed blocks whose
// sums are combined by a pairwise tree, so the result does not depend on the
// thread count.
MCEstimate estimate_tail(const IncrementModel& m, double a, std::int64_t n, std::int64_t paths, std::uint64_t seed,
                         unsigned threads = 1);
MCEstimate estimate_moment(const IncrementModel& m, double a, double r, std::int64_t paths, std::int64_t cap,
                           std::uint64_t seed, unsigned threads = 1);
MCEstimate tilted_estimate_tail(const IncrementModel& m, double a, std::int64_t n, std::int64_t paths,
                                std::uint64_t seed, unsigned threads = 1);

}  // namespace ladder
