#include "lexfair/existence.hpp"

#include "lexfair/efficiency.hpp"
#include "lexfair/fairness.hpp"
#include "lexfair/matching.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace lexfair {

// ---- criteria -------------------------------------------------------------------

FairnessCriterion FairnessCriterion::efk(int k)
{
    if (k < 1) {
        throw std::invalid_argument("EFk needs k >= 1");
    }
    return {Kind::EFk, k};
}

FairnessCriterion FairnessCriterion::parse(std::string_view text)
{
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "ef") {
        return ef();
    }
    if (s == "efx") {
        return efx();
    }
    if (s == "ef1") {
        return ef1();
    }
    if (s == "mms") {
        return mms();
    }
    const std::size_t digits = s.rfind("efk:", 0) == 0 ? 4 : s.rfind("ef", 0) == 0 ? 2 : s.size();
    if (digits < s.size() && std::all_of(s.begin() + digits, s.end(), [](unsigned char c) { return std::isdigit(c); })) {
        int k = 0;
        try {
            k = std::stoi(s.substr(digits));
        } catch (const std::out_of_range&) {
            k = 0;
        }
        return efk(k);
    }
    throw std::invalid_argument("unknown fairness criterion '" + std::string(text) + "'");
}

std::string FairnessCriterion::name() const
{
    switch (kind) {
    case Kind::EF:
        return "ef";
    case Kind::EFX:
        return "efx";
    case Kind::EFk:
        return k == 1 ? "ef1" : "efk:" + std::to_string(k);
    case Kind::MMS:
        return "mms";
    }
    return "?";
}

bool satisfies(const Instance& inst, const Allocation& a, const FairnessCriterion& crit)
{
    switch (crit.kind) {
    case FairnessCriterion::Kind::EF:
        return is_ef(inst, a).holds;
    case FairnessCriterion::Kind::EFX:
        return is_efx(inst, a).holds;
    case FairnessCriterion::Kind::EFk:
        return is_ef_k(inst, a, crit.k).holds;
    case FairnessCriterion::Kind::MMS:
        return is_mms(inst, a).holds;
    }
    return false;
}

// ---- rank-maximal feasibility ------------------------------------------------------

bool RmFeasibility::allows(GoodId g, AgentId i) const
{
    const auto& o = owners[g];
    return std::binary_search(o.begin(), o.end(), i);
}

Bundle RmFeasibility::feasible_for(AgentId i) const
{
    Bundle out;
    for (GoodId g = 0; g < static_cast<GoodId>(owners.size()); ++g) {
        if (allows(g, i)) {
            out.insert(g);
        }
    }
    return out;
}

RmFeasibility rm_feasible_owners(const Instance& inst)
{
    const auto best = best_ranks(inst);
    RmFeasibility rm;
    rm.owners.resize(inst.num_goods());
    for (GoodId g = 0; g < inst.num_goods(); ++g) {
        for (AgentId i = 0; i < inst.num_agents(); ++i) {
            if (inst.ranking(i).position(g) + 1 == best[g]) {
                rm.owners[g].push_back(i);
            }
        }
    }
    return rm;
}

Allocation extend_rank_maximally(const Instance& inst, Allocation partial)
{
    const auto rm = rm_feasible_owners(inst);
    const Bundle open = inst.all_goods() - partial.assigned();
    for (GoodId g : open.goods()) {
        partial.assign(g, rm.owners[g].front());
    }
    return partial;
}

namespace {

Allocation post_verified(const Instance& inst, Allocation a, const FairnessCriterion& crit, const char* who)
{
    if (!a.is_complete(inst) || !is_rank_maximal(inst, a) || !satisfies(inst, a, crit)) {
        throw InternalError(std::string(who) + " produced an allocation failing " + crit.name() + "+RM");
    }
    return a;
}

Allocation from_matching(int n, const std::vector<int>& match)
{
    Allocation a(n);
    for (AgentId i = 0; i < n; ++i) {
        a.assign(match[i], i);
    }
    return a;
}

} // namespace

std::optional<Allocation> exists_ef_rm(const Instance& inst)
{
    const int n = inst.num_agents();
    // An agent's favourite good has rank 1, so it is always rank-maximally assignable to it.
    std::vector<std::vector<int>> adjacency(n);
    for (AgentId i = 0; i < n; ++i) {
        adjacency[i].push_back(inst.ranking(i).top());
    }
    const auto match = max_bipartite_matching(adjacency, inst.num_goods());
    if (!saturates_left(match)) {
        return std::nullopt;
    }
    return post_verified(inst, extend_rank_maximally(inst, from_matching(n, match)), FairnessCriterion::ef(),
                         "exists_ef_rm");
}

std::optional<Allocation> exists_mms_rm(const Instance& inst)
{
    const int n = inst.num_agents();
    const int m = inst.num_goods();
    const auto crit = FairnessCriterion::mms();
    if (m < n) {
        // Every maximin threshold is empty, so any rank-maximal allocation works.
        return post_verified(inst, greedy_rank_maximal(inst), crit, "exists_mms_rm");
    }
    const auto rm = rm_feasible_owners(inst);

    std::vector<std::vector<int>> adjacency(n);
    for (AgentId i = 0; i < n; ++i) {
        for (int p = 0; p < n - 1; ++p) {
            const GoodId g = inst.ranking(i).at(p);
            if (rm.allows(g, i)) {
                adjacency[i].push_back(g);
            }
        }
    }
    const auto match = max_bipartite_matching(adjacency, m);
    if (saturates_left(match)) {
        return post_verified(inst, extend_rank_maximally(inst, from_matching(n, match)), crit, "exists_mms_rm");
    }

    const int bottom_size = m - n + 1;
    std::vector<AgentId> can_take_bottom;
    for (AgentId i = 0; i < n; ++i) {
        const Bundle bottom = inst.ranking(i).suffix(bottom_size);
        if (bottom.subset_of(rm.feasible_for(i))) {
            can_take_bottom.push_back(i);
        }
    }
    if (can_take_bottom.empty()) {
        return std::nullopt;
    }

    // Someone can rank-maximally take its whole bottom block, which forces every
    // agent to rank that block identically in the last m-n+1 positions.
    const Bundle bottom = inst.ranking(can_take_bottom.front()).suffix(bottom_size);
    for (AgentId i = 0; i < n; ++i) {
        if (inst.ranking(i).suffix(bottom_size) != bottom) {
            throw InternalError("agents disagree on the bottom block although one can take it rank-maximally");
        }
    }
    const std::vector<GoodId> top_goods = (inst.all_goods() - bottom).goods();
    const int meta = static_cast<int>(top_goods.size());
    std::vector<std::vector<int>> meta_adjacency(n);
    for (AgentId i = 0; i < n; ++i) {
        for (int v = 0; v < meta; ++v) {
            if (rm.allows(top_goods[v], i)) {
                meta_adjacency[i].push_back(v);
            }
        }
        if (std::binary_search(can_take_bottom.begin(), can_take_bottom.end(), i)) {
            meta_adjacency[i].push_back(meta);
        }
    }
    const auto meta_match = max_bipartite_matching(meta_adjacency, meta + 1);
    if (!saturates_left(meta_match)) {
        return std::nullopt;
    }
    Allocation a(n);
    for (AgentId i = 0; i < n; ++i) {
        if (meta_match[i] == meta) {
            a.give(i, bottom);
        } else {
            a.assign(top_goods[meta_match[i]], i);
        }
    }
    return post_verified(inst, std::move(a), crit, "exists_mms_rm");
}

namespace {

void require_three_agents(const Instance& inst)
{
    if (inst.num_agents() != 3) {
        throw std::invalid_argument("the EF1+RM procedure is defined for exactly three agents");
    }
}

bool tops_distinct(const Instance& inst)
{
    std::vector<bool> seen(inst.num_goods(), false);
    for (const Ranking& r : inst.profile()) {
        if (seen[r.top()]) {
            return false;
        }
        seen[r.top()] = true;
    }
    return true;
}

Allocation forced_assignments(const Instance& inst, const RmFeasibility& rm)
{
    Allocation a(inst.num_agents());
    for (GoodId g = 0; g < inst.num_goods(); ++g) {
        if (rm.owners[g].size() == 1) {
            a.assign(g, rm.owners[g].front());
        }
    }
    return a;
}

bool ef1_rm(const Instance& inst, const Allocation& a)
{
    return is_ef_k(inst, a, 1).holds && is_rank_maximal(inst, a);
}

} // namespace

std::optional<Allocation> ef1_rm_three_case_analysis(const Instance& inst)
{
    require_three_agents(inst);
    if (tops_distinct(inst)) {
        return exists_ef_rm(inst);
    }
    const auto rm = rm_feasible_owners(inst);
    const Allocation forced = forced_assignments(inst, rm);

    // The contested top good and the agents sharing it.
    GoodId contested = -1;
    std::vector<AgentId> sharers;
    for (AgentId i = 0; i < 3 && contested < 0; ++i) {
        for (AgentId h = i + 1; h < 3; ++h) {
            if (inst.ranking(i).top() == inst.ranking(h).top()) {
                contested = inst.ranking(i).top();
                break;
            }
        }
    }
    for (AgentId i = 0; i < 3; ++i) {
        if (inst.ranking(i).top() == contested) {
            sharers.push_back(i);
        }
    }

    for (AgentId winner : sharers) {
        Allocation a = forced;
        a.assign(contested, winner);
        for (AgentId loser : sharers) {
            if (loser == winner) {
                continue;
            }
            const Bundle taken = a.assigned();
            for (GoodId g : inst.ranking(loser).order()) {
                if (!taken.contains(g) && rm.allows(g, loser)) {
                    a.assign(g, loser);
                    break;
                }
            }
        }
        if (!is_ef_k(inst, a, 1).holds) {
            continue;
        }
        Allocation full = extend_rank_maximally(inst, std::move(a));
        if (ef1_rm(inst, full)) {
            return full;
        }
    }
    return std::nullopt;
}

std::optional<Allocation> exists_ef1_rm_three(const Instance& inst)
{
    if (auto found = ef1_rm_three_case_analysis(inst)) {
        return found;
    }
    // Exact fallback over the owners of every agent's top three goods.
    const auto rm = rm_feasible_owners(inst);
    const Allocation forced = forced_assignments(inst, rm);
    Bundle critical;
    for (const Ranking& r : inst.profile()) {
        critical |= r.prefix(3);
    }
    std::vector<GoodId> branch;
    for (GoodId g : (critical - forced.assigned()).goods()) {
        branch.push_back(g);
    }
    std::vector<std::size_t> choice(branch.size(), 0);
    for (;;) {
        Allocation a = forced;
        for (std::size_t b = 0; b < branch.size(); ++b) {
            a.assign(branch[b], rm.owners[branch[b]][choice[b]]);
        }
        Allocation full = extend_rank_maximally(inst, std::move(a));
        if (ef1_rm(inst, full)) {
            return full;
        }
        std::size_t b = 0;
        while (b < branch.size() && ++choice[b] == rm.owners[branch[b]].size()) {
            choice[b] = 0;
            ++b;
        }
        if (b == branch.size()) {
            break;
        }
    }
    return std::nullopt;
}

std::optional<Allocation> exists_rm_with_small_bundle(const Instance& inst)
{
    const auto rm = rm_feasible_owners(inst);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        int forced_to_i = 0;
        for (const auto& o : rm.owners) {
            forced_to_i += (o.size() == 1 && o.front() == i) ? 1 : 0;
        }
        if (forced_to_i > 1) {
            continue;
        }
        Allocation a(inst.num_agents());
        for (GoodId g = 0; g < inst.num_goods(); ++g) {
            const auto& o = rm.owners[g];
            const auto other = std::find_if(o.begin(), o.end(), [i](AgentId h) { return h != i; });
            a.assign(g, other != o.end() ? *other : i);
        }
        return a;
    }
    return std::nullopt;
}

// ---- exact search --------------------------------------------------------------

namespace {

class FairRmSearch {
public:
    FairRmSearch(const Instance& inst, const FairnessCriterion& crit, std::uint64_t budget)
        : inst_(inst),
          crit_(crit),
          budget_(budget),
          rm_(rm_feasible_owners(inst)),
          bundles_(inst.num_agents()),
          unassigned_(inst.all_goods())
    {
        const int n = inst.num_agents();
        const int m = inst.num_goods();
        for (AgentId i = 0; i < n; ++i) {
            feasible_.push_back(rm_.feasible_for(i));
            agent_class_.push_back(i);
            for (AgentId j = 0; j < i; ++j) {
                if (inst.ranking(j) == inst.ranking(i)) {
                    agent_class_[i] = agent_class_[j];
                    break;
                }
            }
            if (m >= n) {
                mms_top_.push_back(inst.ranking(i).prefix(n - 1));
                mms_bottom_.push_back(inst.ranking(i).suffix(m - n + 1));
            }
        }
        const auto best = best_ranks(inst);
        order_.resize(m);
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](GoodId a, GoodId b) {
            const auto sa = rm_.owners[a].size();
            const auto sb = rm_.owners[b].size();
            return sa != sb ? sa < sb : best[a] < best[b];
        });
    }

    SearchResult run()
    {
        SearchResult out;
        bool found = false;
        if (!any_mms_dead()) {
            found = dfs(0);
        }
        out.nodes = nodes_;
        if (found) {
            out.status = SearchStatus::Found;
            out.allocation = Allocation(bundles_);
        } else {
            out.status = out_of_budget_ ? SearchStatus::Unknown : SearchStatus::None;
        }
        return out;
    }

private:
    bool dfs(std::size_t depth)
    {
        if (depth == order_.size()) {
            return satisfies(inst_, Allocation(bundles_), crit_);
        }
        const GoodId g = order_[depth];
        unassigned_.erase(g);
        const auto& owners = rm_.owners[g];
        for (std::size_t c = 0; c < owners.size(); ++c) {
            const AgentId a = owners[c];
            if (interchangeable_with_earlier(owners, c)) {
                continue;
            }
            if (++nodes_ > budget_) {
                out_of_budget_ = true;
                break;
            }
            bundles_[a].insert(g);
            if (!violates_after(g, a) && dfs(depth + 1)) {
                return true;
            }
            bundles_[a].erase(g);
            if (out_of_budget_) {
                break;
            }
        }
        unassigned_.insert(g);
        return false;
    }

    /// Agents with identical rankings and empty bundles are interchangeable;
    /// only the lowest-indexed one is tried.
    bool interchangeable_with_earlier(const std::vector<AgentId>& owners, std::size_t c) const
    {
        const AgentId a = owners[c];
        if (!bundles_[a].empty()) {
            return false;
        }
        for (std::size_t d = 0; d < c; ++d) {
            const AgentId b = owners[d];
            if (agent_class_[b] == agent_class_[a] && bundles_[b].empty()) {
                return true;
            }
        }
        return false;
    }

    Bundle potential(AgentId i) const { return bundles_[i] | (unassigned_ & feasible_[i]); }

    /// True when no completion can repair agent i's complaint against h.
    bool pair_dead(AgentId i, AgentId h) const
    {
        const Bundle& theirs = bundles_[h];
        const Ranking& r = inst_.ranking(i);
        int allowance = 0;
        switch (crit_.kind) {
        case FairnessCriterion::Kind::EF:
            allowance = 0;
            break;
        case FairnessCriterion::Kind::EFX:
            if (theirs.size() < 2) {
                return false;
            }
            allowance = 0;
            break;
        case FairnessCriterion::Kind::EFk:
            allowance = crit_.k;
            break;
        case FairnessCriterion::Kind::MMS:
            return false;
        }
        if (theirs.size() <= allowance) {
            return false;
        }
        const auto offending = r.best_in(theirs - r.top_of(theirs, allowance));
        const auto hope = r.best_in(potential(i));
        return !hope || r.prefers(*offending, *hope);
    }

    bool mms_dead(AgentId i) const
    {
        if (mms_top_.empty()) {
            return false;
        }
        if (bundles_[i].intersects(mms_top_[i]) || (unassigned_ & feasible_[i]).intersects(mms_top_[i])) {
            return false;
        }
        return !(mms_bottom_[i] - potential(i)).empty();
    }

    bool any_mms_dead() const
    {
        if (crit_.kind != FairnessCriterion::Kind::MMS) {
            return false;
        }
        for (AgentId i = 0; i < inst_.num_agents(); ++i) {
            if (mms_dead(i)) {
                return true;
            }
        }
        return false;
    }

    /// Largest bundle size an empty-handed agent can tolerate in someone else's hands.
    int allowance() const
    {
        switch (crit_.kind) {
        case FairnessCriterion::Kind::EF:
            return 0;
        case FairnessCriterion::Kind::EFX:
            return 1;
        case FairnessCriterion::Kind::EFk:
            return crit_.k;
        case FairnessCriterion::Kind::MMS:
            break;
        }
        return kMaxGoods;
    }

    /// Once some bundle is too large for an empty-handed agent to accept, every
    /// agent still empty needs a distinct unassigned good it may receive.
    bool empty_agents_starve() const
    {
        const int n = inst_.num_agents();
        bool must_fill = false;
        for (AgentId h = 0; h < n && !must_fill; ++h) {
            must_fill = bundles_[h].size() > allowance();
        }
        if (!must_fill) {
            return false;
        }
        std::vector<std::vector<int>> adjacency;
        for (AgentId i = 0; i < n; ++i) {
            if (!bundles_[i].empty()) {
                continue;
            }
            const auto options = (unassigned_ & feasible_[i]).goods();
            if (options.empty()) {
                return true;
            }
            adjacency.emplace_back(options.begin(), options.end());
        }
        if (adjacency.empty()) {
            return false;
        }
        return !saturates_left(max_bipartite_matching(adjacency, inst_.num_goods()));
    }

    bool violates_after(GoodId g, AgentId a) const
    {
        if (crit_.kind == FairnessCriterion::Kind::MMS) {
            return any_mms_dead();
        }
        if (empty_agents_starve()) {
            return true;
        }
        const int n = inst_.num_agents();
        for (AgentId i = 0; i < n; ++i) {
            if (i != a && pair_dead(i, a)) {
                return true;
            }
        }
        for (AgentId i = 0; i < n; ++i) {
            if (i == a || !feasible_[i].contains(g)) {
                continue;
            }
            for (AgentId h = 0; h < n; ++h) {
                if (h != i && pair_dead(i, h)) {
                    return true;
                }
            }
        }
        return false;
    }

    const Instance& inst_;
    FairnessCriterion crit_;
    std::uint64_t budget_;
    RmFeasibility rm_;
    std::vector<Bundle> feasible_;
    std::vector<AgentId> agent_class_;
    std::vector<Bundle> mms_top_;
    std::vector<Bundle> mms_bottom_;
    std::vector<GoodId> order_;
    std::vector<Bundle> bundles_;
    Bundle unassigned_;
    std::uint64_t nodes_ = 0;
    bool out_of_budget_ = false;
};

} // namespace

SearchResult solve_fair_rm(const Instance& inst, const FairnessCriterion& crit, std::uint64_t node_budget)
{
    SearchResult result = FairRmSearch(inst, crit, node_budget).run();
    if (result.allocation) {
        post_verified(inst, *result.allocation, crit, "solve_fair_rm");
    }
    return result;
}

std::optional<Allocation> brute_force(const Instance& inst, const std::optional<FairnessCriterion>& crit,
                                      bool require_rm, bool require_po, std::uint64_t budget)
{
    AllocationEnumerator all(inst, true, budget);
    const Signature target = rm_signature(inst);
    while (auto a = all.next()) {
        if (require_rm && allocation_signature(inst, *a) != target) {
            continue;
        }
        if (require_po && !is_pareto_optimal(inst, *a)) {
            continue;
        }
        if (crit && !satisfies(inst, *a, *crit)) {
            continue;
        }
        return a;
    }
    return std::nullopt;
}

} // namespace lexfair
