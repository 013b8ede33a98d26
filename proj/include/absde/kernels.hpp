#pragma once
// Data-parallel inner loops over path-indexed arrays.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2/FMA (x86-64) or NEON (aarch64) variant. The variant is
// chosen once at runtime from the CPU feature set; ABSDE_KERNELS=scalar
// forces the reference path.
//
// Elementwise kernels (mul, affine, max_abs) give bit-identical results across
// variants. Reductions (dot, sum) and the fused axpy may differ in the last
// bits because lane order and fma rounding differ.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace absde::kernels {

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    /// y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    /// out[i] = x[i] * y[i]
    void (*mul)(const double* x, const double* y, double* out, std::size_t n);
    /// out[i] = a * x[i] + b  (unfused)
    void (*affine)(const double* x, double a, double b, double* out, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Table used by the library. Resolved on first use.
const KernelTable& active();
/// Force a variant by name ("scalar", "avx2", "neon"); returns false if unavailable.
bool select(std::string_view name);
/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available();

}  // namespace absde::kernels
