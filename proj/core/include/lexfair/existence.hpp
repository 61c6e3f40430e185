#pragma once

#include "lexfair/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexfair {

/// Fairness notion paired with rank-maximality in existence queries.
struct FairnessCriterion {
    enum class Kind { EF, EFX, EFk, MMS };

    Kind kind = Kind::EF;
    int k = 1; ///< only meaningful for EFk

    static FairnessCriterion ef() { return {Kind::EF, 1}; }
    static FairnessCriterion efx() { return {Kind::EFX, 1}; }
    static FairnessCriterion ef1() { return {Kind::EFk, 1}; }
    static FairnessCriterion efk(int k);
    static FairnessCriterion mms() { return {Kind::MMS, 1}; }

    /// Accepts ef, efx, ef1, ef<k>, efk:<k>, mms (case-insensitive).
    static FairnessCriterion parse(std::string_view text);
    /// Lower-case name as accepted by parse(): "ef", "efx", "ef1", "efk:3", "mms".
    std::string name() const;

    friend bool operator==(const FairnessCriterion&, const FairnessCriterion&) = default;
};

bool satisfies(const Instance& inst, const Allocation& a, const FairnessCriterion& crit);

/// For each good, the agents ranking it best among all agents (ascending).
/// Assigning every good within its set is equivalent to rank-maximality.
struct RmFeasibility {
    std::vector<std::vector<AgentId>> owners;

    bool allows(GoodId g, AgentId i) const;
    /// Goods agent i may receive in a rank-maximal allocation.
    Bundle feasible_for(AgentId i) const;
};

RmFeasibility rm_feasible_owners(const Instance& inst);

/// Gives every unassigned good to its lowest-indexed rank-maximal owner.
Allocation extend_rank_maximally(const Instance& inst, Allocation partial);

/// EF+RM: match agents to their top goods; when the matching saturates the
/// agents, extend rank-maximally.
std::optional<Allocation> exists_ef_rm(const Instance& inst);

/// MMS+RM via matchings on top-(n-1) goods, falling back to one agent taking
/// its whole bottom block as a single meta good.
std::optional<Allocation> exists_mms_rm(const Instance& inst);

/// EF1+RM for three agents. Throws std::invalid_argument unless n == 3.
std::optional<Allocation> exists_ef1_rm_three(const Instance& inst);

/// Only the shared-top case analysis (forced assignments, contested top good,
/// losers take their best feasible good). Sound but not complete on its own;
/// exposed so its coverage can be measured.
std::optional<Allocation> ef1_rm_three_case_analysis(const Instance& inst);

/// Some rank-maximal allocation gives at least one agent at most one good.
std::optional<Allocation> exists_rm_with_small_bundle(const Instance& inst);

inline constexpr std::uint64_t kDefaultNodeBudget = 20'000'000;

enum class SearchStatus { Found, None, Unknown };

struct SearchResult {
    SearchStatus status = SearchStatus::Unknown;
    std::optional<Allocation> allocation;
    std::uint64_t nodes = 0;
};

/// Exact backtracking over rank-maximal allocations. Goods with the fewest
/// rank-maximal owners are branched first; agents with identical rankings
/// are treated as interchangeable while their bundles are empty. Returns
/// Unknown (never a false None) when more than `node_budget` nodes are needed.
SearchResult solve_fair_rm(const Instance& inst, const FairnessCriterion& crit,
                           std::uint64_t node_budget = kDefaultNodeBudget);

/// Scans every complete allocation and returns the first passing the requested
/// checks. Throws BudgetExceeded when n^m exceeds `budget`.
std::optional<Allocation> brute_force(const Instance& inst, const std::optional<FairnessCriterion>& crit,
                                      bool require_rm, bool require_po,
                                      std::uint64_t budget = kDefaultAllocationBudget);

} // namespace lexfair
