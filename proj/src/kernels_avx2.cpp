#include "ladder/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace ladder::kernels {
namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d x0 = _mm256_loadu_pd(x + i);
        __m256d x1 = _mm256_loadu_pd(x + i + 4);
        __m256d y0 = _mm256_loadu_pd(y + i);
        __m256d y1 = _mm256_loadu_pd(y + i + 4);
        y0 = _mm256_add_pd(y0, _mm256_mul_pd(va, x0));
        y1 = _mm256_add_pd(y1, _mm256_mul_pd(va, x1));
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        y0 = _mm256_add_pd(y0, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, y0);
    }
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

inline void neumaier(double& s, double& c, double v) {
    double t = s + v;
    if (std::fabs(s) >= std::fabs(v))
        c += (s - t) + v;
    else
        c += (v - t) + s;
    s = t;
}

// Per-lane Neumaier step.
inline void neumaier4(__m256d& s, __m256d& c, __m256d v) {
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d t = _mm256_add_pd(s, v);
    __m256d big_s = _mm256_cmp_pd(_mm256_and_pd(s, absmask), _mm256_and_pd(v, absmask), _CMP_GE_OQ);
    __m256d when_s = _mm256_add_pd(_mm256_sub_pd(s, t), v);
    __m256d when_v = _mm256_add_pd(_mm256_sub_pd(v, t), s);
    c = _mm256_add_pd(c, _mm256_blendv_pd(when_v, when_s, big_s));
    s = t;
}

double reduce_lanes(__m256d s, __m256d c, double tail_s, double tail_c) {
    alignas(32) double ls[4], lc[4];
    _mm256_store_pd(ls, s);
    _mm256_store_pd(lc, c);
    double rs = 0.0, rc = 0.0;
    for (int k = 0; k < 4; ++k) {
        neumaier(rs, rc, ls[k]);
        neumaier(rs, rc, lc[k]);
    }
    neumaier(rs, rc, tail_s);
    neumaier(rs, rc, tail_c);
    return rs + rc;
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d s = _mm256_setzero_pd(), c = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) neumaier4(s, c, _mm256_loadu_pd(x + i));
    double ts = 0.0, tc = 0.0;
    for (; i < n; ++i) neumaier(ts, tc, x[i]);
    return reduce_lanes(s, c, ts, tc);
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d s = _mm256_setzero_pd(), c = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        neumaier4(s, c, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    double ts = 0.0, tc = 0.0;
    for (; i < n; ++i) neumaier(ts, tc, x[i] * y[i]);
    return reduce_lanes(s, c, ts, tc);
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t{"avx2", axpy_avx2, sum_avx2, dot_avx2};
    return t;
}

}  // namespace ladder::kernels
