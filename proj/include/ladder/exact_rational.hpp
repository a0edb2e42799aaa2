#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ladder/increments.hpp"

namespace ladder {

using Rational = boost::multiprecision::cpp_rational;

// Survival table in exact rational arithmetic, taking the binary value of
// every stored mass exactly. Limited to n <= 64 and small supports; used to
// calibrate the floating-point DP.
std::vector<Rational> survival_rational(const IncrementModel& m, double a, std::int64_t n);

}  // namespace ladder
