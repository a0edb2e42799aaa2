#pragma once

#include <cstddef>

namespace ladder::kernels {

// Inner loops of the lattice DP and the Spitzer recurrence. Each table entry
// has a scalar reference and an AVX2 variant; the active table is chosen once
// at runtime from CPU support and LADDER_FORCE_SCALAR.
struct KernelTable {
    const char* name;
    // y[i] += a * x[i]; bitwise identical across variants (no FMA contraction).
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // Neumaier-compensated sum.
    double (*sum)(const double* x, std::size_t n);
    // Dot product with compensated accumulation of the rounded products.
    double (*dot)(const double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_table();
const KernelTable& avx2_table();
bool avx2_available();

const KernelTable& active();
// Overrides the runtime selection; mostly for tests and the --scalar flag.
void force_scalar(bool on);

}  // namespace ladder::kernels
