#pragma once

#include "lexfair/model.hpp"

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace lexfair {

/// Agents take turns in `seq` order, each taking its favourite remaining good.
/// Throws std::invalid_argument when an id is out of range or seq is longer than m.
Allocation run_picking_sequence(const Instance& inst, const PickingSequence& seq);

/// Phase-2 picking policy of the EFX+PO family. Every agent it names must be
/// unenvied after the serial-dictatorship round.
struct TauPolicy {
    /// Fixed sequence of length m - n.
    struct Explicit {
        PickingSequence seq;
    };
    /// Every leftover good goes to one agent; nullopt means the last agent of sigma.
    struct AllToOne {
        std::optional<AgentId> agent;
    };
    /// Cycle through `order`; an empty order means all unenvied agents by index.
    struct RoundRobin {
        std::vector<AgentId> order;
    };

    std::variant<Explicit, AllToOne, RoundRobin> rule;

    static TauPolicy explicit_sequence(PickingSequence seq) { return {Explicit{std::move(seq)}}; }
    static TauPolicy all_to(std::optional<AgentId> agent = std::nullopt) { return {AllToOne{agent}}; }
    static TauPolicy round_robin(std::vector<AgentId> order = {}) { return {RoundRobin{std::move(order)}}; }
};

/// Intermediate state of one run of the EFX+PO family.
struct Algorithm1Trace {
    Allocation after_phase1;
    std::vector<AgentId> unenvied;
    PickingSequence tau;
    Allocation result;
};

/// One serial-dictatorship round by `sigma`, then the leftover goods are picked
/// by unenvied agents according to `tau`. With fewer goods than agents only
/// the first m agents of sigma pick. Throws std::invalid_argument when sigma is
/// not a permutation, tau names an envied agent, or an explicit tau has the
/// wrong length.
Allocation algorithm1(const Instance& inst, const std::vector<AgentId>& sigma, const TauPolicy& tau);
Algorithm1Trace algorithm1_trace(const Instance& inst, const std::vector<AgentId>& sigma, const TauPolicy& tau);

/// Agents nobody envies under `a`, ascending.
std::vector<AgentId> unenvied_agents(const Instance& inst, const Allocation& a);

/// Serial dictatorship round, then every leftover good to the last agent of sigma.
Allocation algorithm2(const Instance& inst, const std::vector<AgentId>& sigma);

/// Serial dictatorship with quotas: the p-th agent of sigma takes its
/// favourite remaining bundle of size quotas[p], i.e. its top quotas[p]
/// remaining goods. Throws std::invalid_argument unless the quotas sum to m.
Allocation sdq(const Instance& inst, const std::vector<AgentId>& sigma, const std::vector<int>& quotas);

struct Decomposition {
    std::vector<AgentId> sigma;
    PickingSequence tau;
};

/// Recovers (sigma, tau) with algorithm1(inst, sigma, explicit tau) == a, or
/// nullopt when `a` is not both EFX and Pareto optimal.
std::optional<Decomposition> decompose_efx_po(const Instance& inst, const Allocation& a);

/// Identity permutation 0..n-1.
std::vector<AgentId> identity_order(int n);

} // namespace lexfair
