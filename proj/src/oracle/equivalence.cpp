#include "ac/oracle/equivalence.hpp"

#include <stdexcept>
#include <unordered_map>

namespace ac::oracle {
namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const {
        std::size_t h = 1469598103934665603ULL;
        for (std::int64_t v : k)
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

double table_dev(const TabularModel& vsp_model, const std::vector<std::uint32_t>& base_idx,
                 const EvalResult& vsp_res, const EvalResult& raw_res) {
    double dev = 0.0;
    for (std::size_t s = 0; s < vsp_model.n_states(); ++s) {
        const auto& qv = vsp_res.q[s];
        const auto& qr = raw_res.q[base_idx[s]];
        if (qv.size() != qr.size())
            throw std::logic_error("vsp equivalence: decision spaces diverged");
        for (std::size_t e = 0; e < qv.size(); ++e)
            dev = std::max(dev, std::fabs(qv[e] - qr[e]));
    }
    return dev;
}

}  // namespace

EquivalenceReport vsp_equivalence_test(env::Env& raw_env, const std::string& env_name,
                                       double gamma, std::size_t n_policies,
                                       std::uint64_t env_seed, std::uint64_t policy_seed,
                                       std::size_t state_budget, double threshold) {
    EquivalenceReport report;
    report.env_name = env_name;
    report.policies = n_policies;
    report.threshold = threshold;

    RawEnumerable raw(raw_env);
    TabularModel raw_model = enumerate_tabular(raw, env_seed, state_budget);

    vsp::VspWrapper wrapper(raw_env.clone());
    VspEnumerable wrapped(wrapper);
    TabularModel vsp_model = enumerate_tabular(wrapped, env_seed, state_budget);

    report.raw_states = raw_model.n_states();
    report.vsp_states = vsp_model.n_states();

    std::unordered_map<std::vector<std::int64_t>, std::uint32_t, KeyHash> raw_index;
    for (std::size_t s = 0; s < raw_model.n_states(); ++s)
        raw_index.emplace(raw_model.keys[s], static_cast<std::uint32_t>(s));

    std::vector<std::uint32_t> base_idx(vsp_model.n_states());
    for (std::size_t s = 0; s < vsp_model.n_states(); ++s) {
        auto it = raw_index.find(vsp_model.base_keys[s]);
        if (it == raw_index.end())
            throw std::logic_error("vsp equivalence: wrapped state with unreachable base");
        base_idx[s] = it->second;
        // deciding slots and their allowed actions must agree exactly
        if (vsp_model.deciders[s] != raw_model.deciders[it->second])
            throw std::logic_error("vsp equivalence: decider mismatch against base state");
    }

    Rng rng(policy_seed);
    for (std::size_t p = 0; p < n_policies; ++p) {
        TabularPolicy raw_policy = random_policy(raw_model, rng);
        TabularPolicy vsp_policy;
        vsp_policy.weights.resize(vsp_model.n_states());
        for (std::size_t s = 0; s < vsp_model.n_states(); ++s)
            vsp_policy.weights[s] = raw_policy.weights[base_idx[s]];

        EvalResult raw_res = policy_eval(raw_model, raw_policy, gamma);
        EvalResult vsp_res = policy_eval(vsp_model, vsp_policy, gamma);
        report.max_policy_dev =
            std::max(report.max_policy_dev, table_dev(vsp_model, base_idx, vsp_res, raw_res));
    }

    EvalResult raw_opt = value_iteration(raw_model, gamma);
    EvalResult vsp_opt = value_iteration(vsp_model, gamma);
    report.max_optimal_dev = table_dev(vsp_model, base_idx, vsp_opt, raw_opt);

    report.pass =
        report.max_policy_dev < threshold && report.max_optimal_dev < threshold;
    return report;
}

}  // namespace ac::oracle
