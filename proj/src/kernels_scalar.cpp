#include "ladder/kernels.hpp"

#include <cmath>

namespace ladder::kernels {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

inline void neumaier(double& s, double& c, double v) {
    double t = s + v;
    if (std::fabs(s) >= std::fabs(v))
        c += (s - t) + v;
    else
        c += (v - t) + s;
    s = t;
}

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) neumaier(s, c, x[i]);
    return s + c;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) neumaier(s, c, x[i] * y[i]);
    return s + c;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{"scalar", axpy_scalar, sum_scalar, dot_scalar};
    return t;
}

}  // namespace ladder::kernels
