#include "absde/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace absde::kernels {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
        a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_neon(const double* x, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vaddq_f64(a0, vld1q_f64(x + i));
        a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void mul_neon(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void affine_neon(const double* x, double a, double b, double* out, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vmulq_f64(va, vld1q_f64(x + i)), vb));
    for (; i < n; ++i) {
        const double p = a * x[i];
        out[i] = p + b;
    }
}

double max_abs_neon(const double* x, std::size_t n) {
    double r = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vabsq_f64(vld1q_f64(x + i));
        const double v0 = vgetq_lane_f64(v, 0);
        const double v1 = vgetq_lane_f64(v, 1);
        if (v0 > r) r = v0;
        if (v1 > r) r = v1;
    }
    for (; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > r) r = v;
    }
    return r;
}

}  // namespace

const KernelTable* neon_table() {
    static const KernelTable table{"neon", dot_neon, sum_neon, axpy_neon, mul_neon, affine_neon, max_abs_neon};
    return &table;
}

}  // namespace absde::kernels

#else

namespace absde::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace absde::kernels

#endif
