#include "ac/oracle/tabular.hpp"

#include <deque>
#include <stdexcept>
#include <string>

#include "ac/kern/kernels.hpp"

namespace ac::oracle {
namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const {
        std::size_t h = 1469598103934665603ULL;
        for (std::int64_t v : k) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace

std::vector<std::pair<int, std::vector<int>>> RawEnumerable::deciders() const {
    env::StepResult res = env_.view();
    std::vector<std::pair<int, std::vector<int>>> out;
    for (std::size_t i = 0; i < res.decision_mask.size(); ++i) {
        if (!res.decision_mask[i]) continue;
        std::vector<int> avail;
        for (std::size_t a = 0; a < res.available[i].size(); ++a)
            if (res.available[i][a]) avail.push_back(static_cast<int>(a));
        out.emplace_back(static_cast<int>(i), std::move(avail));
    }
    return out;
}

std::pair<double, bool> RawEnumerable::apply(const std::vector<int>& decisions) {
    env::StepResult res = env_.view();
    std::vector<int> joint(res.decision_mask.size(), 0);
    std::size_t d = 0;
    for (std::size_t i = 0; i < joint.size(); ++i)
        if (res.decision_mask[i]) joint[i] = decisions.at(d++);
    env::StepResult next = env_.step(joint);
    return {next.reward, next.terminated};
}

std::vector<std::pair<int, std::vector<int>>> VspEnumerable::deciders() const {
    const vsp::WrapStep& ws = w_.current();
    std::vector<std::pair<int, std::vector<int>>> out;
    for (const auto& slot : ws.slots) {
        if (slot.phase != vsp::SlotPhase::deciding) continue;
        std::vector<int> avail;
        const auto& row = ws.slot_avail[static_cast<std::size_t>(slot.slot_id)];
        for (std::size_t a = 0; a < row.size(); ++a)
            if (row[a]) avail.push_back(static_cast<int>(a));
        out.emplace_back(slot.slot_id, std::move(avail));
    }
    return out;
}

std::pair<double, bool> VspEnumerable::apply(const std::vector<int>& decisions) {
    vsp::WrapStep ws = w_.step(decisions);
    return {ws.reward, ws.terminated};
}

std::vector<int> TabularModel::decode(std::size_t state, std::size_t edge_in_row) const {
    const auto& dec = deciders[state];
    std::vector<int> out(dec.size(), 0);
    std::size_t rem = edge_in_row;
    for (std::size_t d = dec.size(); d-- > 0;) {
        const std::size_t width = dec[d].second.size();
        out[d] = dec[d].second[rem % width];
        rem /= width;
    }
    return out;
}

TabularModel enumerate_tabular(Enumerable& e, std::uint64_t seed, std::size_t state_budget) {
    TabularModel m;
    std::unordered_map<std::vector<std::int64_t>, std::uint32_t, KeyHash> index;

    e.reset(seed);
    auto intern = [&](const std::vector<std::int64_t>& key) -> std::uint32_t {
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (m.keys.size() >= state_budget)
            throw std::runtime_error("enumerate_tabular: state budget " +
                                     std::to_string(state_budget) + " exceeded at " +
                                     std::to_string(m.keys.size()) + " states");
        const auto id = static_cast<std::uint32_t>(m.keys.size());
        index.emplace(key, id);
        m.keys.push_back(key);
        e.restore(key);
        m.base_keys.push_back(e.base_key());
        m.terminal.push_back(e.terminal() ? 1 : 0);
        m.deciders.push_back(e.terminal()
                                 ? std::vector<std::pair<int, std::vector<int>>>{}
                                 : e.deciders());
        return id;
    };

    m.root = intern(e.key());
    std::deque<std::uint32_t> frontier = {static_cast<std::uint32_t>(m.root)};
    std::vector<char> expanded;

    // expand in discovery order; edge rows are appended per state, so track
    // rows in a second pass structure
    std::vector<std::vector<TabularModel::Edge>> rows;
    rows.resize(1);
    expanded.push_back(0);

    while (!frontier.empty()) {
        const std::uint32_t s = frontier.front();
        frontier.pop_front();
        if (expanded[s]) continue;
        expanded[s] = 1;
        if (m.terminal[s]) continue;
        // copies: intern() grows m.* and rows while this row is being built
        const auto dec = m.deciders[s];
        const auto state_key = m.keys[s];
        std::size_t combos = 1;
        for (const auto& [slot, avail] : dec) combos *= avail.size();
        std::vector<TabularModel::Edge> row;
        row.reserve(combos);
        for (std::size_t c = 0; c < combos; ++c) {
            e.restore(state_key);
            std::vector<int> decisions(dec.size());
            std::size_t rem = c;
            for (std::size_t d = dec.size(); d-- > 0;) {
                const std::size_t width = dec[d].second.size();
                decisions[d] = dec[d].second[rem % width];
                rem /= width;
            }
            auto [reward, terminated] = e.apply(decisions);
            (void)terminated;
            const std::size_t before = m.keys.size();
            const std::uint32_t next = intern(e.key());
            if (m.keys.size() > before) {
                rows.emplace_back();
                expanded.push_back(0);
                frontier.push_back(next);
            }
            row.push_back({next, reward, 1.0});
        }
        rows[s] = std::move(row);
    }

    m.row_offset.resize(m.keys.size());
    std::size_t total = 0;
    for (std::size_t s = 0; s < rows.size(); ++s) {
        m.row_offset[s] = static_cast<std::uint32_t>(total);
        total += rows[s].size();
    }
    m.edges.reserve(total);
    for (auto& row : rows)
        for (auto& edge : row) m.edges.push_back(edge);
    return m;
}

TabularPolicy random_policy(const TabularModel& m, Rng& rng) {
    TabularPolicy p;
    p.weights.resize(m.n_states());
    for (std::size_t s = 0; s < m.n_states(); ++s) {
        for (const auto& [slot, avail] : m.deciders[s]) {
            std::vector<double> w(avail.size());
            double total = 0.0;
            for (auto& x : w) {
                x = 0.05 + rng.uniform();  // bounded away from zero mass
                total += x;
            }
            for (auto& x : w) x /= total;
            p.weights[s].push_back(std::move(w));
        }
    }
    return p;
}

namespace {

/// Edge probabilities under a policy, aligned with the edge array.
std::vector<double> edge_probs(const TabularModel& m, const TabularPolicy& policy) {
    std::vector<double> probs(m.edges.size(), 0.0);
    for (std::size_t s = 0; s < m.n_states(); ++s) {
        const auto& dec = m.deciders[s];
        const std::size_t row = m.row_size(s);
        for (std::size_t c = 0; c < row; ++c) {
            double pr = 1.0;
            std::size_t rem = c;
            for (std::size_t d = dec.size(); d-- > 0;) {
                const std::size_t width = dec[d].second.size();
                pr *= policy.weights[s][d][rem % width];
                rem /= width;
            }
            probs[m.row_offset[s] + c] = pr;
        }
    }
    return probs;
}

template <typename Mix>
EvalResult iterate(const TabularModel& m, double gamma, double residual_target,
                   std::size_t max_sweeps, Mix mix_v) {
    EvalResult res;
    std::vector<double> q(m.edges.size(), 0.0), qn(m.edges.size(), 0.0);
    std::vector<double> v(m.n_states(), 0.0);
    for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        for (std::size_t s = 0; s < m.n_states(); ++s)
            v[s] = m.terminal[s] ? 0.0 : mix_v(s, q.data() + m.row_offset[s], m.row_size(s));
        double residual = 0.0;
        for (std::size_t i = 0; i < m.edges.size(); ++i) {
            const auto& e = m.edges[i];
            qn[i] = e.reward + gamma * e.prob * v[e.next];
            residual = std::max(residual, std::fabs(qn[i] - q[i]));
        }
        std::swap(q, qn);
        if (residual < residual_target) {
            res.iterations = sweep;
            res.residual = residual;
            res.v = std::move(v);
            res.q.resize(m.n_states());
            for (std::size_t s = 0; s < m.n_states(); ++s)
                res.q[s] = std::vector<double>(q.begin() + m.row_offset[s],
                                               q.begin() + m.row_offset[s] + m.row_size(s));
            // refresh V against the final Q
            for (std::size_t s = 0; s < m.n_states(); ++s)
                res.v[s] = m.terminal[s] ? 0.0
                                         : mix_v(s, q.data() + m.row_offset[s], m.row_size(s));
            return res;
        }
    }
    throw std::runtime_error("tabular solve: no convergence within sweep cap");
}

}  // namespace

EvalResult policy_eval(const TabularModel& m, const TabularPolicy& policy, double gamma,
                       double residual_target, std::size_t max_sweeps) {
    const std::vector<double> probs = edge_probs(m, policy);
    return iterate(m, gamma, residual_target, max_sweeps,
                   [&](std::size_t s, const double* qrow, std::size_t n) {
                       return kern::active().dot(n, probs.data() + m.row_offset[s], qrow);
                   });
}

EvalResult value_iteration(const TabularModel& m, double gamma, double residual_target,
                           std::size_t max_sweeps) {
    return iterate(m, gamma, residual_target, max_sweeps,
                   [](std::size_t, const double* qrow, std::size_t n) {
                       double best = qrow[0];
                       for (std::size_t i = 1; i < n; ++i) best = std::max(best, qrow[i]);
                       return best;
                   });
}

std::pair<double, double> mc_root_value(const TabularModel& m, const TabularPolicy& policy,
                                        double gamma, std::size_t episodes, Rng& rng,
                                        std::size_t horizon) {
    const std::vector<double> probs = edge_probs(m, policy);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t ep = 0; ep < episodes; ++ep) {
        std::size_t s = m.root;
        double ret = 0.0, disc = 1.0;
        for (std::size_t t = 0; t < horizon && !m.terminal[s]; ++t) {
            const std::size_t row = m.row_size(s);
            double u = rng.uniform();
            std::size_t pick = row - 1;
            for (std::size_t c = 0; c < row; ++c) {
                u -= probs[m.row_offset[s] + c];
                if (u <= 0.0) {
                    pick = c;
                    break;
                }
            }
            const auto& e = m.edges[m.row_offset[s] + pick];
            ret += disc * e.reward;
            disc *= gamma;
            s = e.next;
        }
        sum += ret;
        sumsq += ret * ret;
    }
    const double n = static_cast<double>(episodes);
    const double mean = sum / n;
    const double var = std::max(0.0, sumsq / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

}  // namespace ac::oracle
