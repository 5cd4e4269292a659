// AVX2/FMA variants of the inner-loop kernels.  Compiled with -mavx2 -mfma;
// only ever called after a runtime CPU check (see simd.cpp).

#include "cellload/simd.hpp"

#if defined(CELLLOAD_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace cellload::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

double squared_distance(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        tail += d * d;
    }
    return hsum(acc) + tail;
}

double sup_abs_diff(const double* a, const double* b, std::size_t n) {
    const __m256d signmask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(signmask, d));
    }
    double m = hmax(acc);
    for (; i < n; ++i) {
        m = std::max(m, std::fabs(a[i] - b[i]));
    }
    return m;
}

ConeSquares cone_squares(const double* a, const double* b, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d up_acc = zero;
    __m256d dn_acc = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d up = _mm256_max_pd(d, zero);
        const __m256d dn = _mm256_min_pd(d, zero);
        up_acc = _mm256_fmadd_pd(up, up, up_acc);
        dn_acc = _mm256_fmadd_pd(dn, dn, dn_acc);
    }
    double above = hsum(up_acc);
    double below = hsum(dn_acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        const double up = std::max(d, 0.0);
        const double dn = std::min(d, 0.0);
        above += up * up;
        below += dn * dn;
    }
    return {above, below};
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

}  // namespace cellload::simd::avx2

#endif  // CELLLOAD_HAVE_AVX2
