#pragma once

#include "lexfair/model.hpp"

#include <optional>
#include <vector>

namespace lexfair {

/// counts[r-1] = number of (agent, good) pairs where the agent holds a good it
/// ranks r-th. Compared lexicographically, larger is better.
struct Signature {
    std::vector<int> counts;

    friend bool operator==(const Signature&, const Signature&) = default;
    friend auto operator<=>(const Signature&, const Signature&) = default;
};

Signature allocation_signature(const Instance& inst, const Allocation& a);

/// Signature shared by every rank-maximal allocation of `inst`.
Signature rm_signature(const Instance& inst);

/// Per good, the smallest 1-based rank any agent gives it.
std::vector<int> best_ranks(const Instance& inst);

/// Throws std::invalid_argument on partial allocations.
bool is_rank_maximal(const Instance& inst, const Allocation& a);

/// Each good goes to the first agent in `tie_break` that ranks it best among
/// all agents. An empty `tie_break` means lowest index first.
Allocation greedy_rank_maximal(const Instance& inst, const std::vector<AgentId>& tie_break = {});

/// Partial allocations are never Pareto optimal. A complete allocation is PO
/// iff it is sequencible: some agent's favourite remaining good is in its own
/// bundle, remove it, repeat until nothing is left.
bool is_pareto_optimal(const Instance& inst, const Allocation& a);

/// A picking sequence reproducing `a`, or nullopt when `a` is not PO. At each
/// step the lowest-indexed eligible agent picks.
std::optional<PickingSequence> extract_picking_sequence(const Instance& inst, const Allocation& a);

} // namespace lexfair
