// AVX2 kernel variants. Compiled with -mavx2 on x86-64 only; the dispatcher
// checks CPU support at runtime before handing out this table.
//
// axpy deliberately uses mul + add instead of vfmadd: the result must round
// exactly like the scalar reference, element by element.

#if defined(__x86_64__)

#include <immintrin.h>

#include "anc/kernels.hpp"

namespace anc::kernels::detail {

namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, va));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) sum += a[i] * a[i];
    return sum;
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{dot_avx2, axpy_avx2, sum_sq_avx2};
    return &table;
}

}  // namespace anc::kernels::detail

#endif  // __x86_64__
