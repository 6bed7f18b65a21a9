#pragma once

#include <string>

#include "ac/oracle/tabular.hpp"

namespace ac::oracle {

struct EquivalenceReport {
    std::string env_name;
    std::size_t raw_states = 0;
    std::size_t vsp_states = 0;
    std::size_t policies = 0;
    double max_policy_dev = 0.0;   // max |Q^pi_dec - Q^pi_vsp| over corresponding pairs
    double max_optimal_dev = 0.0;  // same for Q*
    double threshold = 1e-10;
    bool pass = false;
};

/// Enumerates the raw game and its proxy-wrapped form, evaluates the same
/// random policies on both, and compares Q tables at corresponding
/// (state, decision) pairs; also compares the optimal tables. The wrapped
/// model may hold several states per raw state (different recorded decision
/// observations) — every one of them is compared against its raw counterpart.
EquivalenceReport vsp_equivalence_test(env::Env& raw_env, const std::string& env_name,
                                       double gamma, std::size_t n_policies,
                                       std::uint64_t env_seed, std::uint64_t policy_seed,
                                       std::size_t state_budget = 10000,
                                       double threshold = 1e-10);

}  // namespace ac::oracle
