#include "ac/oracle/fits.hpp"

#include <cmath>
#include <stdexcept>

namespace ac::oracle {
namespace {

/// Solves A x = b for small dense systems, Gaussian elimination with partial
/// pivoting. A is row-major n x n and clobbered.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
        if (std::fabs(a[pivot * n + col]) < 1e-14)
            throw std::runtime_error("least squares: singular normal equations");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
            std::swap(b[pivot], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * x[c];
        x[r] = acc / a[r * n + r];
    }
    return x;
}

FitResult fit(const std::vector<double>& values_a, const std::vector<double>& values_b,
              const std::vector<std::vector<double>>& payoff, bool with_product) {
    const std::size_t nf = with_product ? 4 : 3;
    std::vector<double> xtx(nf * nf, 0.0), xty(nf, 0.0);
    auto features = [&](double va, double vb) {
        std::vector<double> f = {1.0, va, vb};
        if (with_product) f.push_back(va * vb);
        return f;
    };
    for (std::size_t i = 0; i < values_a.size(); ++i) {
        for (std::size_t j = 0; j < values_b.size(); ++j) {
            const auto f = features(values_a[i], values_b[j]);
            const double y = payoff[i][j];
            for (std::size_t r = 0; r < nf; ++r) {
                xty[r] += f[r] * y;
                for (std::size_t c = 0; c < nf; ++c) xtx[r * nf + c] += f[r] * f[c];
            }
        }
    }
    FitResult res;
    res.params = solve_dense(std::move(xtx), std::move(xty), nf);
    for (std::size_t i = 0; i < values_a.size(); ++i) {
        for (std::size_t j = 0; j < values_b.size(); ++j) {
            const auto f = features(values_a[i], values_b[j]);
            double pred = 0.0;
            for (std::size_t r = 0; r < nf; ++r) pred += res.params[r] * f[r];
            const double err = pred - payoff[i][j];
            res.residual += err * err;
        }
    }
    return res;
}

}  // namespace

FitResult additive_fit(const std::vector<double>& values_a, const std::vector<double>& values_b,
                       const std::vector<std::vector<double>>& payoff) {
    return fit(values_a, values_b, payoff, false);
}

FitResult mvd_fit(const std::vector<double>& values_a, const std::vector<double>& values_b,
                  const std::vector<std::vector<double>>& payoff) {
    return fit(values_a, values_b, payoff, true);
}

}  // namespace ac::oracle
