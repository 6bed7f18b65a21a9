#include "ac/kern/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define AC_KERN_X86 1
#else
#define AC_KERN_X86 0
#endif

#if AC_KERN_X86 && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

// add/sub/mul/scal compute the same per-lane operations as the scalar
// reference and are bit-equal across variants. The accumulating kernels
// (dot/sum/axpy/mul_acc and the matmuls built on them) fuse multiply-add and
// reorder lanes, so they match the reference only up to rounding.

namespace ac::kern {
namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_avx2(std::size_t n, const double* x) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(
            y + i + 4,
            _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scal_avx2(std::size_t n, double a, double* x) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

void add_avx2(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_avx2(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_avx2(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc_avx2(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                                                  _mm256_loadu_pd(b + i),
                                                  _mm256_loadu_pd(out + i)));
    }
    for (; i < n; ++i) out[i] = out[i] + a[i] * b[i];
}

void matmul_avx2(std::size_t m, std::size_t k, std::size_t n,
                 const double* a, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) _mm256_storeu_pd(crow + j, _mm256_setzero_pd());
        for (; j < n; ++j) crow[j] = 0.0;
        const double* arow = a + i * k;
        std::size_t p = 0;
        // 4-way unroll over the inner dimension keeps the output row in
        // registers longer
        for (; p + 4 <= k; p += 4) {
            const __m256d a0 = _mm256_set1_pd(arow[p]);
            const __m256d a1 = _mm256_set1_pd(arow[p + 1]);
            const __m256d a2 = _mm256_set1_pd(arow[p + 2]);
            const __m256d a3 = _mm256_set1_pd(arow[p + 3]);
            const double* b0 = b + p * n;
            const double* b1 = b0 + n;
            const double* b2 = b1 + n;
            const double* b3 = b2 + n;
            std::size_t q = 0;
            for (; q + 4 <= n; q += 4) {
                __m256d acc = _mm256_loadu_pd(crow + q);
                acc = _mm256_fmadd_pd(a0, _mm256_loadu_pd(b0 + q), acc);
                acc = _mm256_fmadd_pd(a1, _mm256_loadu_pd(b1 + q), acc);
                acc = _mm256_fmadd_pd(a2, _mm256_loadu_pd(b2 + q), acc);
                acc = _mm256_fmadd_pd(a3, _mm256_loadu_pd(b3 + q), acc);
                _mm256_storeu_pd(crow + q, acc);
            }
            for (; q < n; ++q)
                crow[q] += arow[p] * b0[q] + arow[p + 1] * b1[q] + arow[p + 2] * b2[q] +
                           arow[p + 3] * b3[q];
        }
        for (; p < k; ++p) axpy_avx2(n, arow[p], b + p * n, crow);
    }
}

void matmul_at_b_acc_avx2(std::size_t m, std::size_t k, std::size_t n,
                          const double* a, const double* b, double* c) {
    // outer loop over output rows keeps each C row hot; 4-way unroll over
    // the batch rows of A and B
    for (std::size_t p = 0; p < k; ++p) {
        double* crow = c + p * n;
        std::size_t i = 0;
        for (; i + 4 <= m; i += 4) {
            const __m256d a0 = _mm256_set1_pd(a[i * k + p]);
            const __m256d a1 = _mm256_set1_pd(a[(i + 1) * k + p]);
            const __m256d a2 = _mm256_set1_pd(a[(i + 2) * k + p]);
            const __m256d a3 = _mm256_set1_pd(a[(i + 3) * k + p]);
            const double* b0 = b + i * n;
            const double* b1 = b0 + n;
            const double* b2 = b1 + n;
            const double* b3 = b2 + n;
            std::size_t q = 0;
            for (; q + 4 <= n; q += 4) {
                __m256d acc = _mm256_loadu_pd(crow + q);
                acc = _mm256_fmadd_pd(a0, _mm256_loadu_pd(b0 + q), acc);
                acc = _mm256_fmadd_pd(a1, _mm256_loadu_pd(b1 + q), acc);
                acc = _mm256_fmadd_pd(a2, _mm256_loadu_pd(b2 + q), acc);
                acc = _mm256_fmadd_pd(a3, _mm256_loadu_pd(b3 + q), acc);
                _mm256_storeu_pd(crow + q, acc);
            }
            for (; q < n; ++q)
                crow[q] += a[i * k + p] * b0[q] + a[(i + 1) * k + p] * b1[q] +
                           a[(i + 2) * k + p] * b2[q] + a[(i + 3) * k + p] * b3[q];
        }
        for (; i < m; ++i) axpy_avx2(n, a[i * k + p], b + i * n, crow);
    }
}

void matmul_a_bt_acc_avx2(std::size_t m, std::size_t n, std::size_t k,
                          const double* a, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            c[i * k + p] += dot_avx2(n, arow, b + p * n);
        }
    }
}

}  // namespace

const Kernels* avx2_kernels() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
    static const Kernels k = {
        "avx2",
        dot_avx2,
        sum_avx2,
        axpy_avx2,
        scal_avx2,
        add_avx2,
        sub_avx2,
        mul_avx2,
        mul_acc_avx2,
        matmul_avx2,
        matmul_at_b_acc_avx2,
        matmul_a_bt_acc_avx2,
    };
    return &k;
}

}  // namespace ac::kern

#else

namespace ac::kern {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace ac::kern

#endif
