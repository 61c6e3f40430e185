#include "lexfair/efficiency.hpp"

#include <algorithm>
#include <numeric>

namespace lexfair {

Signature allocation_signature(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    Signature sig{std::vector<int>(inst.num_goods(), 0)};
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        for (GoodId g : a.bundle(i).goods()) {
            ++sig.counts[inst.ranking(i).position(g)];
        }
    }
    return sig;
}

std::vector<int> best_ranks(const Instance& inst)
{
    std::vector<int> best(inst.num_goods(), inst.num_goods() + 1);
    for (const Ranking& r : inst.profile()) {
        for (GoodId g = 0; g < inst.num_goods(); ++g) {
            best[g] = std::min(best[g], r.position(g) + 1);
        }
    }
    return best;
}

Signature rm_signature(const Instance& inst)
{
    Signature sig{std::vector<int>(inst.num_goods(), 0)};
    for (int rank : best_ranks(inst)) {
        ++sig.counts[rank - 1];
    }
    return sig;
}

bool is_rank_maximal(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    if (!a.is_complete(inst)) {
        throw std::invalid_argument("rank-maximality is defined for complete allocations");
    }
    return allocation_signature(inst, a) == rm_signature(inst);
}

Allocation greedy_rank_maximal(const Instance& inst, const std::vector<AgentId>& tie_break)
{
    std::vector<AgentId> order = tie_break;
    if (order.empty()) {
        order.resize(inst.num_agents());
        std::iota(order.begin(), order.end(), 0);
    }
    if (static_cast<int>(order.size()) != inst.num_agents()) {
        throw std::invalid_argument("tie-break order must list every agent once");
    }
    const auto best = best_ranks(inst);
    Allocation a(inst.num_agents());
    for (GoodId g = 0; g < inst.num_goods(); ++g) {
        for (AgentId i : order) {
            if (inst.ranking(i).position(g) + 1 == best[g]) {
                a.assign(g, i);
                break;
            }
        }
    }
    return a;
}

std::optional<PickingSequence> extract_picking_sequence(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    if (!a.is_complete(inst)) {
        return std::nullopt;
    }
    PickingSequence seq;
    Bundle remaining = inst.all_goods();
    while (!remaining.empty()) {
        bool picked = false;
        for (AgentId i = 0; i < inst.num_agents() && !picked; ++i) {
            const GoodId fav = *inst.ranking(i).best_in(remaining);
            if (a.bundle(i).contains(fav)) {
                seq.push_back(i);
                remaining.erase(fav);
                picked = true;
            }
        }
        if (!picked) {
            return std::nullopt;
        }
    }
    return seq;
}

bool is_pareto_optimal(const Instance& inst, const Allocation& a)
{
    return extract_picking_sequence(inst, a).has_value();
}

} // namespace lexfair
