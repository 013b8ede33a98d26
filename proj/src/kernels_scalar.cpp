#include "absde/kernels.hpp"

#include <cmath>

namespace absde::kernels {
namespace {

double dot_ref(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_ref(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void axpy_ref(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void mul_ref(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void affine_ref(const double* x, double a, double b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b;
}

double max_abs_ref(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", dot_ref, sum_ref, axpy_ref, mul_ref, affine_ref, max_abs_ref};
    return table;
}

}  // namespace absde::kernels
