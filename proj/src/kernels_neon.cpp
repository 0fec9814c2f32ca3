// NEON kernel variants for aarch64, where NEON is architecturally mandatory.
//
// axpy uses vmul + vadd rather than vfma so every backend rounds each
// multiply and add separately, matching the scalar reference bit for bit.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "anc/kernels.hpp"

namespace anc::kernels::detail {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vaddq_f64(vy, vmulq_f64(va, vld1q_f64(x + i)));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_neon(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t va = vld1q_f64(a + i);
        acc = vaddq_f64(acc, vmulq_f64(va, va));
    }
    double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) sum += a[i] * a[i];
    return sum;
}

}  // namespace

const KernelTable* neon_table() {
    static const KernelTable table{dot_neon, axpy_neon, sum_sq_neon};
    return &table;
}

}  // namespace anc::kernels::detail

#endif  // __aarch64__
