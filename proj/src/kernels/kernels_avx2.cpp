// AVX2+FMA variants. Four parallel accumulators per kernel; the horizontal
// reduction order is fixed (lane 0..3, then the scalar tail), so a given
// binary is deterministic on a given machine.

#include "intona/kernels.hpp"

#include <immintrin.h>

#include <cstdint>

namespace intona::kernels::avx2 {

namespace {

inline double hsum(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swap = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

} // namespace

double dot(const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double wrapped_table_dot(const double* w, std::size_t n, const double* table,
                         std::size_t period, std::size_t start, std::size_t step)
{
    // Four lanes walk the table with stride `step`, indices kept in [0, period)
    // by a compare-masked subtract; lane i starts at (start + i*step) mod period.
    // Index arithmetic stays in int32: period is a lag count (< 2^31) and
    // idx + 4*step mod period < 2*period.
    std::int32_t s0 = static_cast<std::int32_t>(start);
    const std::int32_t p = static_cast<std::int32_t>(period);
    const std::int32_t st = static_cast<std::int32_t>(step);
    alignas(16) std::int32_t lane[4];
    for (int j = 0; j < 4; ++j) {
        lane[j] = s0;
        s0 += st;
        if (s0 >= p)
            s0 -= p;
    }
    __m128i idx = _mm_load_si128(reinterpret_cast<const __m128i*>(lane));
    std::int32_t step4 = static_cast<std::int32_t>((4 * static_cast<std::int64_t>(st)) % p);
    const __m128i vstep = _mm_set1_epi32(step4);
    const __m128i vperiod = _mm_set1_epi32(p);
    const __m128i vmax = _mm_set1_epi32(p - 1);

    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_i32gather_pd(table, idx, 8);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), t, acc);
        idx = _mm_add_epi32(idx, vstep);
        const __m128i wrap = _mm_cmpgt_epi32(idx, vmax);
        idx = _mm_sub_epi32(idx, _mm_and_si128(wrap, vperiod));
    }
    double sum = hsum(acc);
    alignas(16) std::int32_t tail[4];
    _mm_store_si128(reinterpret_cast<__m128i*>(tail), idx);
    std::size_t k = static_cast<std::size_t>(tail[0]);
    for (; i < n; ++i) {
        sum += w[i] * table[k];
        k += step;
        if (k >= period)
            k -= period;
    }
    return sum;
}

} // namespace intona::kernels::avx2
