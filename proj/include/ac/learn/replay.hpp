#pragma once

#include "ac/core/rng.hpp"
#include "ac/learn/episode.hpp"

namespace ac::learn {

/// Episode ring with FIFO eviction. Sampling is uniform without replacement
/// within one draw.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void add(Episode ep) {
        if (episodes_.size() < capacity_) {
            episodes_.push_back(std::move(ep));
        } else {
            episodes_[write_] = std::move(ep);
        }
        write_ = (write_ + 1) % capacity_;
        ++total_added_;
    }

    std::size_t size() const { return episodes_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t total_added() const { return total_added_; }
    const Episode& at(std::size_t i) const { return episodes_[i]; }

    std::vector<const Episode*> sample(std::size_t n, Rng& rng) const {
        // partial Fisher-Yates over an index scratch
        std::vector<std::size_t> idx(episodes_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::vector<const Episode*> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n && i < idx.size(); ++i) {
            const std::size_t j = i + rng.below(idx.size() - i);
            std::swap(idx[i], idx[j]);
            out.push_back(&episodes_[idx[i]]);
        }
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t write_ = 0;
    std::size_t total_added_ = 0;
    std::vector<Episode> episodes_;
};

}  // namespace ac::learn
