#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "ac/core/rng.hpp"
#include "ac/env/env.hpp"
#include "ac/vsp/wrapper.hpp"

namespace ac::oracle {

/// What breadth-first enumeration needs from a decision process: a restorable
/// state key, the deciding slots with their allowed actions, and a
/// deterministic apply. base_key ties a state back to the underlying raw
/// state (identity for raw environments).
class Enumerable {
public:
    virtual ~Enumerable() = default;
    virtual void reset(std::uint64_t seed) = 0;
    virtual std::vector<std::int64_t> key() const = 0;
    virtual std::vector<std::int64_t> base_key() const = 0;
    virtual void restore(const std::vector<std::int64_t>& k) = 0;
    virtual bool terminal() const = 0;
    /// (slot id, allowed action ids), in slot order.
    virtual std::vector<std::pair<int, std::vector<int>>> deciders() const = 0;
    /// One decision per decider, in the same order. Returns (reward, terminated).
    virtual std::pair<double, bool> apply(const std::vector<int>& decisions) = 0;
};

class RawEnumerable final : public Enumerable {
public:
    explicit RawEnumerable(env::Env& env) : env_(env) {}
    void reset(std::uint64_t seed) override { env_.reset(seed); }
    std::vector<std::int64_t> key() const override { return env_.save_state(); }
    std::vector<std::int64_t> base_key() const override { return env_.save_state(); }
    void restore(const std::vector<std::int64_t>& k) override { env_.load_state(k); }
    bool terminal() const override { return env_.view().terminated; }
    std::vector<std::pair<int, std::vector<int>>> deciders() const override;
    std::pair<double, bool> apply(const std::vector<int>& decisions) override;

private:
    env::Env& env_;
};

class VspEnumerable final : public Enumerable {
public:
    explicit VspEnumerable(vsp::VspWrapper& w) : w_(w) {}
    void reset(std::uint64_t seed) override { w_.reset(seed); }
    std::vector<std::int64_t> key() const override { return w_.save_state(); }
    std::vector<std::int64_t> base_key() const override { return w_.base().save_state(); }
    void restore(const std::vector<std::int64_t>& k) override { w_.load_state(k); }
    bool terminal() const override { return w_.current().terminated; }
    std::vector<std::pair<int, std::vector<int>>> deciders() const override;
    std::pair<double, bool> apply(const std::vector<int>& decisions) override;

private:
    vsp::VspWrapper& w_;
};

/// Explicit model of the reachable game: deterministic edges indexed in
/// lexicographic decision order per state (last decider fastest).
struct TabularModel {
    struct Edge {
        std::uint32_t next = 0;
        double reward = 0.0;
        double prob = 1.0;  // deterministic envs: singleton rows
    };

    std::vector<std::vector<std::int64_t>> keys;
    std::vector<std::vector<std::int64_t>> base_keys;
    std::vector<char> terminal;
    std::vector<std::vector<std::pair<int, std::vector<int>>>> deciders;
    std::vector<std::uint32_t> row_offset;  // per state, into edges
    std::vector<Edge> edges;
    std::size_t root = 0;

    std::size_t n_states() const { return keys.size(); }
    std::size_t row_size(std::size_t s) const {
        return (s + 1 < row_offset.size() ? row_offset[s + 1] : edges.size()) - row_offset[s];
    }
    /// Decodes an edge index into per-decider choices.
    std::vector<int> decode(std::size_t state, std::size_t edge_in_row) const;
};

/// Breadth-first enumeration from reset(seed). Throws if more than
/// state_budget states are reachable, reporting the count so far.
TabularModel enumerate_tabular(Enumerable& e, std::uint64_t seed,
                               std::size_t state_budget = 10000);

/// Per-state, per-decider distributions over the allowed action lists.
struct TabularPolicy {
    std::vector<std::vector<std::vector<double>>> weights;
};

TabularPolicy random_policy(const TabularModel& m, Rng& rng);

struct EvalResult {
    std::vector<std::vector<double>> q;  // per state, aligned with edge rows
    std::vector<double> v;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Iterates the Bellman expectation operator to the residual target.
EvalResult policy_eval(const TabularModel& m, const TabularPolicy& policy, double gamma,
                       double residual_target = 1e-12, std::size_t max_sweeps = 1000000);

/// Iterates the Bellman optimality operator to the residual target.
EvalResult value_iteration(const TabularModel& m, double gamma,
                           double residual_target = 1e-12, std::size_t max_sweeps = 1000000);

/// Monte-Carlo return estimate from the root under a policy (for
/// cross-checking policy_eval). Returns (mean, standard error).
std::pair<double, double> mc_root_value(const TabularModel& m, const TabularPolicy& policy,
                                        double gamma, std::size_t episodes, Rng& rng,
                                        std::size_t horizon = 200);

}  // namespace ac::oracle
