#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ac {

/// mt19937_64 with hand-rolled distributions. std:: distribution objects are
/// implementation-defined, which would tie reproducibility to the standard
/// library build; everything here is pinned arithmetic.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // rejection sampling keeps the draw unbiased
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return v % n;
    }

    int index(const std::vector<int>& candidates) {
        return candidates[below(candidates.size())];
    }

    std::uint64_t raw() { return gen_(); }

    /// Child generator with a decorrelated seed, for per-component streams.
    Rng split(std::uint64_t stream) {
        return Rng(gen_() ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ac
