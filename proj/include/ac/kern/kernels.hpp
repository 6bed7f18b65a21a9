#pragma once

#include <cstddef>
#include <string_view>

// Dense double-precision kernels behind the tensor ops. A scalar reference
// implementation always exists; an AVX2 variant is selected at runtime when
// the CPU supports it. All matrices are row-major.
//
// add/sub/mul/scal compute identical per-element operations in every variant
// and must produce bit-equal results. The accumulating kernels (dot, sum,
// axpy, mul_acc, matmuls) may fuse multiply-add and reorder lanes, so
// variants agree only up to rounding there.

namespace ac::kern {

struct Kernels {
    const char* name;

    // reductions
    double (*dot)(std::size_t n, const double* x, const double* y);
    double (*sum)(std::size_t n, const double* x);

    // elementwise, out may alias an input of the same length
    void (*axpy)(std::size_t n, double a, const double* x, double* y);  // y += a*x
    void (*scal)(std::size_t n, double a, double* x);                   // x *= a
    void (*add)(std::size_t n, const double* a, const double* b, double* out);
    void (*sub)(std::size_t n, const double* a, const double* b, double* out);
    void (*mul)(std::size_t n, const double* a, const double* b, double* out);
    void (*mul_acc)(std::size_t n, const double* a, const double* b, double* out);  // out += a*b

    // C[M,N] = A[M,K] * B[K,N]
    void (*matmul)(std::size_t m, std::size_t k, std::size_t n,
                   const double* a, const double* b, double* c);
    // C[K,N] += A^T[K,M] * B[M,N]   (A given as [M,K])
    void (*matmul_at_b_acc)(std::size_t m, std::size_t k, std::size_t n,
                            const double* a, const double* b, double* c);
    // C[M,K] += A[M,N] * B^T[N,K]   (B given as [K,N]; row dot products)
    void (*matmul_a_bt_acc)(std::size_t m, std::size_t n, std::size_t k,
                            const double* a, const double* b, double* c);
};

const Kernels& scalar_kernels();

// nullptr when the build or the CPU lacks AVX2 support.
const Kernels* avx2_kernels();

// The active variant. Picked once: ASYNC_CREDIT_KERNELS=scalar|avx2 forces a
// choice, otherwise the best supported variant wins.
const Kernels& active();

// Force a variant by name ("scalar", "avx2", "auto"). Throws on an unknown
// name or an unsupported variant. Intended for tests and benchmarks.
void select(std::string_view name);

}  // namespace ac::kern
