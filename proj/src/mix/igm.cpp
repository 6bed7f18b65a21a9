#include "ac/mix/igm.hpp"

#include <stdexcept>

namespace ac::mix {

IgmVerdict check_igm(const std::function<double(const std::vector<double>&)>& qtot,
                     const IgmInstance& inst, std::size_t budget) {
    const std::size_t n_slots = inst.utility.size();
    std::vector<std::size_t> deciders;
    for (std::size_t i = 0; i < n_slots; ++i)
        if (inst.deciding[i]) deciders.push_back(i);

    std::size_t combos = 1;
    for (std::size_t d : deciders) {
        combos *= inst.utility[d].size();
        if (combos > budget)
            throw std::runtime_error("check_igm: joint action space exceeds budget");
    }

    IgmVerdict verdict;
    for (std::size_t d : deciders) {
        const auto& row = inst.utility[d];
        std::size_t best = 0;
        for (std::size_t a = 1; a < row.size(); ++a)
            if (row[a] > row[best]) best = a;  // strict: ties keep the lowest id
        verdict.per_slot_best.push_back(static_cast<int>(best));
    }

    std::vector<double> chosen(n_slots);
    for (std::size_t i = 0; i < n_slots; ++i)
        if (!inst.deciding[i])
            chosen[i] = inst.utility[i][static_cast<std::size_t>(inst.frozen_action[i])];

    std::vector<std::size_t> assign(deciders.size(), 0);
    double best_q = 0.0;
    bool first = true;
    std::vector<int> best_assign(deciders.size(), 0);
    for (std::size_t it = 0; it < combos; ++it) {
        // lexicographic order makes "first strict max" the lowest-id tie-break
        std::size_t rem = it;
        for (std::size_t d = deciders.size(); d-- > 0;) {
            const std::size_t width = inst.utility[deciders[d]].size();
            assign[d] = rem % width;
            rem /= width;
        }
        for (std::size_t d = 0; d < deciders.size(); ++d)
            chosen[deciders[d]] = inst.utility[deciders[d]][assign[d]];
        const double q = qtot(chosen);
        if (first || q > best_q) {
            first = false;
            best_q = q;
            for (std::size_t d = 0; d < deciders.size(); ++d)
                best_assign[d] = static_cast<int>(assign[d]);
        }
    }
    verdict.joint_best = best_assign;
    verdict.holds = verdict.joint_best == verdict.per_slot_best;
    return verdict;
}

}  // namespace ac::mix
