#include "lexfair/mechanisms.hpp"

#include "lexfair/efficiency.hpp"
#include "lexfair/fairness.hpp"

#include <algorithm>
#include <numeric>

namespace lexfair {

namespace {

void check_permutation(const Instance& inst, const std::vector<AgentId>& sigma)
{
    const int n = inst.num_agents();
    if (static_cast<int>(sigma.size()) != n) {
        throw std::invalid_argument("sigma must list all " + std::to_string(n) + " agents");
    }
    std::vector<bool> seen(n, false);
    for (AgentId i : sigma) {
        if (i < 0 || i >= n || seen[i]) {
            throw std::invalid_argument("sigma is not a permutation of the agents");
        }
        seen[i] = true;
    }
}

void check_agent_id(const Instance& inst, AgentId i)
{
    if (i < 0 || i >= inst.num_agents()) {
        throw std::invalid_argument("agent id " + std::to_string(i) + " out of range");
    }
}

GoodId pick_favourite(const Instance& inst, AgentId i, Bundle& remaining, Allocation& a)
{
    const GoodId g = *inst.ranking(i).best_in(remaining);
    remaining.erase(g);
    a.assign(g, i);
    return g;
}

void require_unenvied(AgentId i, const std::vector<AgentId>& unenvied)
{
    if (!std::binary_search(unenvied.begin(), unenvied.end(), i)) {
        throw std::invalid_argument("tau references agent " + std::to_string(i + 1)
                                    + ", who is envied after phase 1");
    }
}

PickingSequence materialize_tau(const Instance& inst, const std::vector<AgentId>& sigma, const TauPolicy& tau,
                                const std::vector<AgentId>& unenvied, int length)
{
    PickingSequence seq;
    if (const auto* ex = std::get_if<TauPolicy::Explicit>(&tau.rule)) {
        if (static_cast<int>(ex->seq.size()) != length) {
            throw std::invalid_argument("explicit tau has length " + std::to_string(ex->seq.size()) + ", expected "
                                        + std::to_string(length));
        }
        for (AgentId i : ex->seq) {
            check_agent_id(inst, i);
            require_unenvied(i, unenvied);
        }
        seq = ex->seq;
    } else if (const auto* one = std::get_if<TauPolicy::AllToOne>(&tau.rule)) {
        const AgentId target = one->agent.value_or(sigma.back());
        check_agent_id(inst, target);
        if (length > 0) {
            require_unenvied(target, unenvied);
        }
        seq.assign(length, target);
    } else {
        const auto& rr = std::get<TauPolicy::RoundRobin>(tau.rule);
        const std::vector<AgentId>& order = rr.order.empty() ? unenvied : rr.order;
        for (AgentId i : order) {
            check_agent_id(inst, i);
            if (length > 0) {
                require_unenvied(i, unenvied);
            }
        }
        for (int t = 0; t < length; ++t) {
            seq.push_back(order[t % order.size()]);
        }
    }
    return seq;
}

} // namespace

std::vector<AgentId> identity_order(int n)
{
    std::vector<AgentId> order(n);
    std::iota(order.begin(), order.end(), 0);
    return order;
}

Allocation run_picking_sequence(const Instance& inst, const PickingSequence& seq)
{
    if (static_cast<int>(seq.size()) > inst.num_goods()) {
        throw std::invalid_argument("picking sequence is longer than the number of goods");
    }
    Allocation a(inst.num_agents());
    Bundle remaining = inst.all_goods();
    for (AgentId i : seq) {
        check_agent_id(inst, i);
        pick_favourite(inst, i, remaining, a);
    }
    return a;
}

std::vector<AgentId> unenvied_agents(const Instance& inst, const Allocation& a)
{
    std::vector<AgentId> out;
    for (AgentId h = 0; h < inst.num_agents(); ++h) {
        bool envied = false;
        for (AgentId i = 0; i < inst.num_agents() && !envied; ++i) {
            envied = i != h && envies(inst, a, i, h);
        }
        if (!envied) {
            out.push_back(h);
        }
    }
    return out;
}

Algorithm1Trace algorithm1_trace(const Instance& inst, const std::vector<AgentId>& sigma, const TauPolicy& tau)
{
    check_permutation(inst, sigma);
    const int n = inst.num_agents();
    const int m = inst.num_goods();

    Algorithm1Trace trace;
    Allocation a(n);
    Bundle remaining = inst.all_goods();
    for (int p = 0; p < std::min(n, m); ++p) {
        pick_favourite(inst, sigma[p], remaining, a);
    }
    trace.after_phase1 = a;
    trace.unenvied = unenvied_agents(inst, a);

    const int leftover = std::max(0, m - n);
    trace.tau = materialize_tau(inst, sigma, tau, trace.unenvied, leftover);
    for (AgentId i : trace.tau) {
        pick_favourite(inst, i, remaining, a);
    }
    trace.result = std::move(a);
    return trace;
}

Allocation algorithm1(const Instance& inst, const std::vector<AgentId>& sigma, const TauPolicy& tau)
{
    return algorithm1_trace(inst, sigma, tau).result;
}

Allocation algorithm2(const Instance& inst, const std::vector<AgentId>& sigma)
{
    return algorithm1(inst, sigma, TauPolicy::all_to());
}

Allocation sdq(const Instance& inst, const std::vector<AgentId>& sigma, const std::vector<int>& quotas)
{
    check_permutation(inst, sigma);
    if (quotas.size() != sigma.size()) {
        throw std::invalid_argument("one quota per agent is required");
    }
    int total = 0;
    for (int q : quotas) {
        if (q < 0) {
            throw std::invalid_argument("quotas must be non-negative");
        }
        total += q;
    }
    if (total != inst.num_goods()) {
        throw std::invalid_argument("quotas sum to " + std::to_string(total) + ", expected "
                                    + std::to_string(inst.num_goods()));
    }
    Allocation a(inst.num_agents());
    Bundle remaining = inst.all_goods();
    for (std::size_t p = 0; p < sigma.size(); ++p) {
        const Bundle take = inst.ranking(sigma[p]).top_of(remaining, quotas[p]);
        a.give(sigma[p], take);
        remaining = remaining - take;
    }
    return a;
}

std::optional<Decomposition> decompose_efx_po(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    if (!is_efx(inst, a)) {
        return std::nullopt;
    }
    auto extracted = extract_picking_sequence(inst, a);
    if (!extracted) {
        return std::nullopt;
    }
    PickingSequence seq = std::move(*extracted);
    const int n = inst.num_agents();

    // Push the first appearance of each agent ahead of earlier repeats, one
    // move at a time, until the distinct agents form a prefix.
    for (;;) {
        std::vector<bool> seen(n, false);
        std::optional<std::size_t> first_repeat;
        std::optional<std::size_t> late_first;
        for (std::size_t t = 0; t < seq.size(); ++t) {
            if (seen[seq[t]]) {
                if (!first_repeat) {
                    first_repeat = t;
                }
            } else if (first_repeat) {
                late_first = t;
                break;
            }
            seen[seq[t]] = true;
        }
        if (!late_first) {
            break;
        }
        const AgentId mover = seq[*late_first];
        seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(*late_first));
        seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(*first_repeat), mover);
        if (run_picking_sequence(inst, seq) != a) {
            throw InternalError("picking-sequence normalization changed the allocation");
        }
    }

    Decomposition out;
    std::vector<bool> in_sigma(n, false);
    std::size_t prefix = 0;
    while (prefix < seq.size() && !in_sigma[seq[prefix]]) {
        in_sigma[seq[prefix]] = true;
        out.sigma.push_back(seq[prefix]);
        ++prefix;
    }
    // Agents that never pick (only possible when m < n) go last.
    for (AgentId i = 0; i < n; ++i) {
        if (!in_sigma[i]) {
            out.sigma.push_back(i);
        }
    }
    out.tau.assign(seq.begin() + static_cast<std::ptrdiff_t>(prefix), seq.end());
    if (algorithm1(inst, out.sigma, TauPolicy::explicit_sequence(out.tau)) != a) {
        throw InternalError("decomposed (sigma, tau) does not reproduce the allocation");
    }
    return out;
}

} // namespace lexfair
