#pragma once

#include <functional>
#include <vector>

namespace ac::mix {

/// One individual-global-max check instance: per-slot utility rows, which
/// slots get to argmax, and the frozen action for the rest (executing agents
/// and proxies keep their running actions).
struct IgmInstance {
    std::vector<std::vector<double>> utility;  // per slot, per action id
    std::vector<char> deciding;                // per slot
    std::vector<int> frozen_action;            // used when a slot is not deciding
};

struct IgmVerdict {
    bool holds = false;
    std::vector<int> joint_best;     // per deciding slot, from global argmax
    std::vector<int> per_slot_best;  // per deciding slot, from local argmax
};

/// Exhaustively enumerates the deciders' joint action space (ties broken by
/// lowest action id on both sides) and compares the global argmax of
/// qtot(per-slot chosen utilities) with the per-slot argmaxes. Throws if the
/// joint space exceeds the budget.
IgmVerdict check_igm(const std::function<double(const std::vector<double>&)>& qtot,
                     const IgmInstance& inst, std::size_t budget = 1000000);

}  // namespace ac::mix
