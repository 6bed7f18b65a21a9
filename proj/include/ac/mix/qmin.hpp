#pragma once

#include <algorithm>
#include <span>

namespace ac::mix {

/// Running minimum of proxy utilities seen in training. The stored minimum is
/// clamped at zero and only decreases; the exposed offset is its negation, so
/// any already-observed proxy utility plus the offset is nonnegative.
class QminTracker {
public:
    void update(std::span<const double> proxy_utilities) {
        for (double q : proxy_utilities) min_ = std::min(min_, q);
    }

    void update(double q) { min_ = std::min(min_, q); }

    double running_min() const { return min_; }
    double offset() const { return -min_; }

private:
    double min_ = 0.0;
};

}  // namespace ac::mix
