#include "lexfair/axioms.hpp"

#include "lexfair/efficiency.hpp"
#include "lexfair/fairness.hpp"
#include "lexfair/mechanisms.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <thread>

namespace lexfair {

Mechanism algorithm2_mechanism(std::vector<AgentId> sigma)
{
    std::string name = "alg2";
    return {name, [sigma = std::move(sigma)](const Instance& inst) { return algorithm2(inst, sigma); }};
}

Mechanism sdq_mechanism(std::vector<AgentId> sigma, std::vector<int> quotas)
{
    std::string name = "sdq(";
    for (std::size_t p = 0; p < quotas.size(); ++p) {
        name += (p ? "," : "") + std::to_string(quotas[p]);
    }
    name += ")";
    return {name, [sigma = std::move(sigma), quotas = std::move(quotas)](const Instance& inst) {
                return sdq(inst, sigma, quotas);
            }};
}

Mechanism greedy_rm_mechanism()
{
    return {"greedy-rm", [](const Instance& inst) { return greedy_rank_maximal(inst); }};
}

Mechanism constant_mechanism(Allocation fixed)
{
    return {"constant", [fixed = std::move(fixed)](const Instance&) { return fixed; }};
}

std::string axiom_name(Axiom a)
{
    switch (a) {
    case Axiom::StrategyProof:
        return "sp";
    case Axiom::GroupStrategyProof:
        return "gsp";
    case Axiom::NonBossy:
        return "nonbossy";
    case Axiom::Neutral:
        return "neutral";
    case Axiom::EFX:
        return "efx";
    case Axiom::PO:
        return "po";
    case Axiom::MMS:
        return "mms";
    }
    return "?";
}

// ---- outcome table ----------------------------------------------------------------

namespace {

/// Runs body(begin, end) over [0, total) split into `threads` contiguous chunks.
template <class Body>
void parallel_chunks(std::uint64_t total, int threads, Body body)
{
    const std::uint64_t workers = std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(total, 1));
    if (workers == 1) {
        body(0, total);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_lock;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t begin = w * chunk;
        const std::uint64_t end = std::min(total, begin + chunk);
        pool.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace

OutcomeTable::OutcomeTable(const Mechanism& f, int n, int m, const AuditOptions& opts)
    : name_(f.name), n_(n), m_(m), profiles_(n, m, opts.profile_budget)
{
    weights_.assign(n, 1);
    for (int i = n - 2; i >= 0; --i) {
        weights_[i] = weights_[i + 1] * profiles_.domain().size();
    }
    outcomes_.resize(profiles_.size());
    parallel_chunks(outcomes_.size(), opts.threads, [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t p = begin; p < end; ++p) {
            const Instance inst = profiles_.at(p);
            Allocation a = f(inst);
            validate_allocation(inst, a);
            outcomes_[p] = std::move(a);
        }
    });
}

std::uint64_t OutcomeTable::digit(std::uint64_t profile, AgentId i) const
{
    return (profile / weights_[i]) % profiles_.domain().size();
}

std::uint64_t OutcomeTable::with_digit(std::uint64_t profile, AgentId i, std::uint64_t r) const
{
    return profile - digit(profile, i) * weights_[i] + r * weights_[i];
}

std::uint64_t OutcomeTable::index_of(const Instance& inst) const
{
    if (inst.num_agents() != n_ || inst.num_goods() != m_) {
        throw std::invalid_argument("instance does not belong to the audited domain");
    }
    std::uint64_t out = 0;
    for (AgentId i = 0; i < n_; ++i) {
        out += domain().index_of(inst.ranking(i)) * weights_[i];
    }
    return out;
}

// ---- scanning ---------------------------------------------------------------------

namespace {

/// Scans profiles in index order and reports the violation at the smallest
/// profile index, so the answer does not depend on the thread count.
template <class Visit>
std::optional<Counterexample> scan(const OutcomeTable& t, const AuditOptions& opts, Visit visit)
{
    std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
    std::atomic<std::uint64_t> work{0};
    std::mutex lock;
    std::optional<Counterexample> found;
    parallel_chunks(t.size(), opts.threads, [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t local_work = 0;
        for (std::uint64_t p = begin; p < end && p < best.load(); ++p) {
            auto c = visit(p, local_work);
            if (local_work > 4096) {
                if (work.fetch_add(local_work) + local_work > opts.work_budget) {
                    throw BudgetExceeded("audit exceeded its work budget of " + std::to_string(opts.work_budget)
                                         + " comparisons");
                }
                local_work = 0;
            }
            if (c) {
                std::lock_guard guard(lock);
                if (p < best.load()) {
                    best = p;
                    found = std::move(c);
                }
                break;
            }
        }
        if (work.fetch_add(local_work) + local_work > opts.work_budget) {
            throw BudgetExceeded("audit exceeded its work budget of " + std::to_string(opts.work_budget)
                                 + " comparisons");
        }
    });
    return found;
}

AxiomReport report(Axiom a, std::optional<Counterexample> c)
{
    AxiomReport r;
    r.axiom = a;
    r.holds = !c.has_value();
    r.counterexample = std::move(c);
    return r;
}

Counterexample make_counterexample(const OutcomeTable& t, std::uint64_t truthful, std::uint64_t reported)
{
    Counterexample c;
    c.truthful = t.instance(truthful);
    c.reported = t.instance(reported);
    for (AgentId i = 0; i < t.num_agents(); ++i) {
        if (t.digit(truthful, i) != t.digit(reported, i)) {
            c.deviators.push_back(i);
        }
    }
    c.before = t.outcome(truthful);
    c.after = t.outcome(reported);
    return c;
}

Allocation relabel(const Allocation& a, const std::vector<GoodId>& image)
{
    Allocation out(a.num_agents());
    for (AgentId i = 0; i < a.num_agents(); ++i) {
        for (GoodId g : a.bundle(i).goods()) {
            out.assign(image[g], i);
        }
    }
    return out;
}

Ranking relabel(const Ranking& r, const std::vector<GoodId>& image)
{
    std::vector<GoodId> order;
    for (GoodId g : r.order()) {
        order.push_back(image[g]);
    }
    return Ranking(std::move(order));
}

bool coalition_gains(const Instance& truth, const std::vector<AgentId>& members, const Allocation& before,
                     const Allocation& after)
{
    bool strict = false;
    for (AgentId j : members) {
        const LexOrder c = lex_compare(truth.ranking(j), after.bundle(j), before.bundle(j));
        if (c == LexOrder::YbeatsX) {
            return false;
        }
        strict = strict || c == LexOrder::XbeatsY;
    }
    return strict;
}

} // namespace

AxiomReport check_strategyproof(const OutcomeTable& t, const AuditOptions& opts)
{
    const std::uint64_t rankings = t.domain().size();
    auto c = scan(t, opts, [&](std::uint64_t p, std::uint64_t& work) -> std::optional<Counterexample> {
        for (AgentId i = 0; i < t.num_agents(); ++i) {
            const std::uint64_t truth = t.digit(p, i);
            const Ranking& r = t.domain().at(truth);
            const Bundle& honest = t.outcome(p).bundle(i);
            for (std::uint64_t lie = 0; lie < rankings; ++lie) {
                if (lie == truth) {
                    continue;
                }
                ++work;
                const std::uint64_t q = t.with_digit(p, i, lie);
                if (lex_compare(r, t.outcome(q).bundle(i), honest) == LexOrder::XbeatsY) {
                    return make_counterexample(t, p, q);
                }
            }
        }
        return std::nullopt;
    });
    return report(Axiom::StrategyProof, std::move(c));
}

AxiomReport check_group_strategyproof(const OutcomeTable& t, int max_coalition, const AuditOptions& opts)
{
    if (max_coalition < 1) {
        throw std::invalid_argument("coalitions need at least one member");
    }
    const int n = t.num_agents();
    const std::uint64_t rankings = t.domain().size();
    std::vector<std::vector<AgentId>> coalitions;
    for (int size = 1; size <= std::min(max_coalition, n); ++size) {
        for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
            if (std::popcount(mask) != size) {
                continue;
            }
            std::vector<AgentId> members;
            for (AgentId i = 0; i < n; ++i) {
                if (mask & (1U << i)) {
                    members.push_back(i);
                }
            }
            coalitions.push_back(std::move(members));
        }
    }
    auto c = scan(t, opts, [&](std::uint64_t p, std::uint64_t& work) -> std::optional<Counterexample> {
        const Instance truth = t.instance(p);
        for (const auto& members : coalitions) {
            std::vector<std::uint64_t> lie(members.size(), 0);
            for (;;) {
                std::uint64_t q = p;
                for (std::size_t s = 0; s < members.size(); ++s) {
                    q = t.with_digit(q, members[s], lie[s]);
                }
                if (q != p) {
                    ++work;
                    if (coalition_gains(truth, members, t.outcome(p), t.outcome(q))) {
                        Counterexample c = make_counterexample(t, p, q);
                        c.deviators = members;
                        return c;
                    }
                }
                std::size_t s = 0;
                while (s < lie.size() && ++lie[s] == rankings) {
                    lie[s] = 0;
                    ++s;
                }
                if (s == lie.size()) {
                    break;
                }
            }
        }
        return std::nullopt;
    });
    return report(Axiom::GroupStrategyProof, std::move(c));
}

AxiomReport check_non_bossy(const OutcomeTable& t, const AuditOptions& opts)
{
    const std::uint64_t rankings = t.domain().size();
    auto c = scan(t, opts, [&](std::uint64_t p, std::uint64_t& work) -> std::optional<Counterexample> {
        for (AgentId i = 0; i < t.num_agents(); ++i) {
            const std::uint64_t truth = t.digit(p, i);
            for (std::uint64_t lie = 0; lie < rankings; ++lie) {
                if (lie == truth) {
                    continue;
                }
                ++work;
                const std::uint64_t q = t.with_digit(p, i, lie);
                if (t.outcome(q).bundle(i) == t.outcome(p).bundle(i) && t.outcome(q) != t.outcome(p)) {
                    return make_counterexample(t, p, q);
                }
            }
        }
        return std::nullopt;
    });
    return report(Axiom::NonBossy, std::move(c));
}

AxiomReport check_neutral(const OutcomeTable& t, const AuditOptions& opts)
{
    const RankingDomain& dom = t.domain();
    const std::uint64_t rankings = dom.size();
    // image[pi][g] and mapped[pi][r]: the relabeling pi applied to a good / a domain ranking.
    std::vector<std::vector<GoodId>> image(rankings);
    std::vector<std::vector<std::uint64_t>> mapped(rankings, std::vector<std::uint64_t>(rankings));
    for (std::uint64_t pi = 0; pi < rankings; ++pi) {
        const auto order = dom.at(pi).order();
        image[pi].assign(order.begin(), order.end());
        for (std::uint64_t r = 0; r < rankings; ++r) {
            mapped[pi][r] = dom.index_of(relabel(dom.at(r), image[pi]));
        }
    }
    auto c = scan(t, opts, [&](std::uint64_t p, std::uint64_t& work) -> std::optional<Counterexample> {
        for (std::uint64_t pi = 1; pi < rankings; ++pi) {
            std::uint64_t q = 0;
            for (AgentId i = 0; i < t.num_agents(); ++i) {
                q = t.with_digit(q, i, mapped[pi][t.digit(p, i)]);
            }
            ++work;
            if (t.outcome(q) != relabel(t.outcome(p), image[pi])) {
                Counterexample c = make_counterexample(t, p, q);
                c.relabeling = image[pi];
                return c;
            }
        }
        return std::nullopt;
    });
    return report(Axiom::Neutral, std::move(c));
}

namespace {

bool property_holds(Axiom property, const Instance& inst, const Allocation& a)
{
    switch (property) {
    case Axiom::EFX:
        return is_efx(inst, a).holds;
    case Axiom::PO:
        return is_pareto_optimal(inst, a);
    case Axiom::MMS:
        return is_mms_definitional(inst, a).holds;
    default:
        throw std::invalid_argument(axiom_name(property) + " is not a per-profile property");
    }
}

} // namespace

AxiomReport check_profilewise(const OutcomeTable& t, Axiom property, const AuditOptions& opts)
{
    auto c = scan(t, opts, [&](std::uint64_t p, std::uint64_t& work) -> std::optional<Counterexample> {
        ++work;
        if (!property_holds(property, t.instance(p), t.outcome(p))) {
            return make_counterexample(t, p, p);
        }
        return std::nullopt;
    });
    return report(property, std::move(c));
}

AxiomReport check_axiom(const OutcomeTable& t, Axiom a, const AuditOptions& opts)
{
    switch (a) {
    case Axiom::StrategyProof:
        return check_strategyproof(t, opts);
    case Axiom::GroupStrategyProof:
        return check_group_strategyproof(t, t.num_agents(), opts);
    case Axiom::NonBossy:
        return check_non_bossy(t, opts);
    case Axiom::Neutral:
        return check_neutral(t, opts);
    default:
        return check_profilewise(t, a, opts);
    }
}

AxiomReport check_strategyproof(const Mechanism& f, int n, int m, const AuditOptions& opts)
{
    return check_strategyproof(OutcomeTable(f, n, m, opts), opts);
}

AxiomReport check_group_strategyproof(const Mechanism& f, int n, int m, int max_coalition, const AuditOptions& opts)
{
    return check_group_strategyproof(OutcomeTable(f, n, m, opts), max_coalition, opts);
}

AxiomReport check_non_bossy(const Mechanism& f, int n, int m, const AuditOptions& opts)
{
    return check_non_bossy(OutcomeTable(f, n, m, opts), opts);
}

AxiomReport check_neutral(const Mechanism& f, int n, int m, const AuditOptions& opts)
{
    return check_neutral(OutcomeTable(f, n, m, opts), opts);
}

AxiomReport check_strategyproof_at(const Mechanism& f, const Instance& inst)
{
    const RankingDomain dom(inst.num_goods());
    const Allocation honest = f(inst);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        for (std::uint64_t r = 0; r < dom.size(); ++r) {
            if (dom.at(r) == inst.ranking(i)) {
                continue;
            }
            Instance lied = inst.with_ranking(i, dom.at(r));
            Allocation after = f(lied);
            if (lex_compare(inst.ranking(i), after.bundle(i), honest.bundle(i)) == LexOrder::XbeatsY) {
                Counterexample c{inst, std::move(lied), {i}, honest, std::move(after), {}};
                return report(Axiom::StrategyProof, std::move(c));
            }
        }
    }
    return report(Axiom::StrategyProof, std::nullopt);
}

bool replay_confirms(const Mechanism& f, Axiom a, const Counterexample& c)
{
    const Allocation before = f(c.truthful);
    const Allocation after = f(c.reported);
    if (before != c.before || after != c.after) {
        return false;
    }
    bool any_differs = false;
    for (AgentId i = 0; i < c.truthful.num_agents(); ++i) {
        const bool differs = !(c.truthful.ranking(i) == c.reported.ranking(i));
        const bool member = std::binary_search(c.deviators.begin(), c.deviators.end(), i);
        if (differs ? !member : member && a != Axiom::GroupStrategyProof) {
            return false;
        }
        any_differs = any_differs || differs;
    }
    const bool misreport = a == Axiom::StrategyProof || a == Axiom::GroupStrategyProof || a == Axiom::NonBossy;
    if (misreport && !any_differs) {
        return false;
    }
    switch (a) {
    case Axiom::StrategyProof:
    case Axiom::GroupStrategyProof:
        return !c.deviators.empty() && coalition_gains(c.truthful, c.deviators, before, after)
               && (a == Axiom::GroupStrategyProof || c.deviators.size() == 1);
    case Axiom::NonBossy:
        return c.deviators.size() == 1 && before.bundle(c.deviators[0]) == after.bundle(c.deviators[0])
               && before != after;
    case Axiom::Neutral: {
        if (c.relabeling.size() != static_cast<std::size_t>(c.truthful.num_goods())) {
            return false;
        }
        for (AgentId i = 0; i < c.truthful.num_agents(); ++i) {
            if (!(relabel(c.truthful.ranking(i), c.relabeling) == c.reported.ranking(i))) {
                return false;
            }
        }
        return after != relabel(before, c.relabeling);
    }
    default:
        return !property_holds(a, c.truthful, before);
    }
}

// ---- fixtures ----------------------------------------------------------------------

namespace {

Allocation drop_nonbossy(const Instance& inst)
{
    const bool agree = inst.ranking(0) == inst.ranking(1);
    return algorithm2(inst, agree ? std::vector<AgentId>{0, 1, 2, 3} : std::vector<AgentId>{0, 1, 3, 2});
}

Allocation drop_neutral(const Instance& inst)
{
    const int n = inst.num_agents();
    std::vector<AgentId> sigma{0};
    if (inst.ranking(0).top() == 0) {
        for (AgentId i = 1; i < n; ++i) {
            sigma.push_back(i);
        }
    } else {
        for (AgentId i = n - 1; i >= 1; --i) {
            sigma.push_back(i);
        }
    }
    return algorithm2(inst, sigma);
}

Allocation drop_sp(const Instance& inst)
{
    const int n = inst.num_agents();
    const auto sigma = identity_order(n);
    const Allocation round = run_picking_sequence(inst, PickingSequence(sigma.begin(), sigma.begin() + std::min(n, inst.num_goods())));
    if (envies(inst, round, n - 1, n - 2)) {
        return algorithm1(inst, sigma, TauPolicy::all_to(n - 1));
    }
    return algorithm1(inst, sigma, TauPolicy::round_robin({n - 2, n - 1}));
}

Allocation mms_drop_po(const Instance& inst)
{
    const int n = inst.num_agents();
    const auto sigma = identity_order(n);
    Allocation a = run_picking_sequence(inst, PickingSequence(sigma.begin(), sigma.begin() + std::min(n, inst.num_goods())));
    const auto pick = inst.ranking(n - 1).best_in(a.bundle(n - 1));
    if (pick && inst.ranking(n - 1).position(*pick) == n - 1) {
        a.give(n - 1, inst.all_goods() - a.assigned());
    }
    return a;
}

} // namespace

std::vector<Fixture> minimality_fixtures()
{
    return {
        {"drop-efx", sdq_mechanism({0, 1}, {2, 1}), Axiom::EFX, 2, 3, Axiom::EFX},
        {"drop-po", constant_mechanism(Allocation(2)), Axiom::PO, 2, 3, Axiom::EFX},
        {"drop-nonbossy", {"drop-nonbossy", drop_nonbossy}, Axiom::NonBossy, 4, 4, Axiom::EFX},
        {"drop-neutral", {"drop-neutral", drop_neutral}, Axiom::Neutral, 3, 4, Axiom::EFX},
        {"drop-sp", {"drop-sp", drop_sp}, Axiom::StrategyProof, 2, 4, Axiom::EFX},
    };
}

std::vector<Fixture> mms_minimality_fixtures()
{
    return {{"mms-drop-po", {"mms-drop-po", mms_drop_po}, Axiom::PO, 2, 3, Axiom::MMS}};
}

std::optional<Fixture> find_fixture(const std::string& name)
{
    for (auto& f : minimality_fixtures()) {
        if (f.name == name) {
            return f;
        }
    }
    for (auto& f : mms_minimality_fixtures()) {
        if (f.name == name) {
            return f;
        }
    }
    return std::nullopt;
}

} // namespace lexfair
