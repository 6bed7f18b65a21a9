#include "ac/kern/kernels.hpp"

namespace ac::kern {
namespace {

double dot_scalar(std::size_t n, const double* x, const double* y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_scalar(std::size_t n, const double* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scal_scalar(std::size_t n, double a, double* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void add_scalar(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_scalar(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_scalar(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc_scalar(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + a[i] * b[i];
}

void matmul_scalar(std::size_t m, std::size_t k, std::size_t n,
                   const double* a, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            axpy_scalar(n, a[i * k + p], b + p * n, crow);
        }
    }
}

void matmul_at_b_acc_scalar(std::size_t m, std::size_t k, std::size_t n,
                            const double* a, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            axpy_scalar(n, a[i * k + p], brow, c + p * n);
        }
    }
}

void matmul_a_bt_acc_scalar(std::size_t m, std::size_t n, std::size_t k,
                            const double* a, const double* b, double* c) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            c[i * k + p] += dot_scalar(n, arow, b + p * n);
        }
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar",
        dot_scalar,
        sum_scalar,
        axpy_scalar,
        scal_scalar,
        add_scalar,
        sub_scalar,
        mul_scalar,
        mul_acc_scalar,
        matmul_scalar,
        matmul_at_b_acc_scalar,
        matmul_a_bt_acc_scalar,
    };
    return k;
}

}  // namespace ac::kern
