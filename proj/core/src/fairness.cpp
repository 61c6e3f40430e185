#include "lexfair/fairness.hpp"

namespace lexfair {

namespace {

void check_agent(const Instance& inst, AgentId i)
{
    if (i < 0 || i >= inst.num_agents()) {
        throw std::out_of_range("agent index " + std::to_string(i) + " out of range");
    }
}

void require_complete(const Instance& inst, const Allocation& a)
{
    if (!a.is_complete(inst)) {
        throw std::invalid_argument("MMS check requires a complete allocation");
    }
}

} // namespace

bool envies(const Instance& inst, const Allocation& a, AgentId i, AgentId h)
{
    check_agent(inst, i);
    check_agent(inst, h);
    return lex_compare(inst.ranking(i), a.bundle(h), a.bundle(i)) == LexOrder::XbeatsY;
}

FairnessVerdict is_ef(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        for (AgentId h = 0; h < inst.num_agents(); ++h) {
            if (i != h && envies(inst, a, i, h)) {
                return FairnessVerdict::fail({i, h, {}});
            }
        }
    }
    return FairnessVerdict::pass();
}

FairnessVerdict is_efx(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        const Ranking& r = inst.ranking(i);
        for (AgentId h = 0; h < inst.num_agents(); ++h) {
            if (i == h) {
                continue;
            }
            for (GoodId j : a.bundle(h).goods()) {
                if (!lex_weakly_prefers(r, a.bundle(i), a.bundle(h).without(j))) {
                    return FairnessVerdict::fail({i, h, Bundle{j}});
                }
            }
        }
    }
    return FairnessVerdict::pass();
}

FairnessVerdict efx_characterization(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    for (AgentId h = 0; h < inst.num_agents(); ++h) {
        if (a.bundle(h).size() <= 1) {
            continue;
        }
        for (AgentId i = 0; i < inst.num_agents(); ++i) {
            if (i != h && envies(inst, a, i, h)) {
                // Dropping i's least-liked good of A_h keeps i's favourite there.
                const Ranking& r = inst.ranking(i);
                GoodId worst = -1;
                for (GoodId g : a.bundle(h).goods()) {
                    if (worst < 0 || r.prefers(worst, g)) {
                        worst = g;
                    }
                }
                return FairnessVerdict::fail({i, h, Bundle{worst}});
            }
        }
    }
    return FairnessVerdict::pass();
}

FairnessVerdict is_ef_k(const Instance& inst, const Allocation& a, int k)
{
    if (k < 1) {
        throw std::invalid_argument("EFk needs k >= 1");
    }
    validate_allocation(inst, a);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        const Ranking& r = inst.ranking(i);
        for (AgentId h = 0; h < inst.num_agents(); ++h) {
            if (i == h || a.bundle(h).empty()) {
                continue;
            }
            const Bundle removed = r.top_of(a.bundle(h), k);
            if (!lex_weakly_prefers(r, a.bundle(i), a.bundle(h) - removed)) {
                return FairnessVerdict::fail({i, h, removed});
            }
        }
    }
    return FairnessVerdict::pass();
}

MmsPartition mms_partition(const Instance& inst, AgentId i)
{
    check_agent(inst, i);
    const int n = inst.num_agents();
    const int m = inst.num_goods();
    const Ranking& r = inst.ranking(i);
    MmsPartition out;
    if (m < n) {
        for (int p = 0; p < m; ++p) {
            out.parts.push_back(Bundle{r.at(p)});
        }
        out.parts.resize(n);
        return out;
    }
    for (int p = 0; p < n - 1; ++p) {
        out.parts.push_back(Bundle{r.at(p)});
    }
    out.parts.push_back(r.suffix(m - n + 1));
    out.threshold = out.parts.back();
    return out;
}

FairnessVerdict is_mms(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    require_complete(inst, a);
    const int n = inst.num_agents();
    const int m = inst.num_goods();
    for (AgentId i = 0; i < n; ++i) {
        const Ranking& r = inst.ranking(i);
        const Bundle& mine = a.bundle(i);
        if (mine.intersects(r.prefix(n - 1))) {
            continue;
        }
        if (r.suffix(m - n + 1).subset_of(mine)) {
            continue;
        }
        return FairnessVerdict::fail({i, i, {}});
    }
    return FairnessVerdict::pass();
}

FairnessVerdict is_mms_definitional(const Instance& inst, const Allocation& a)
{
    validate_allocation(inst, a);
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        if (!lex_weakly_prefers(inst.ranking(i), a.bundle(i), mms_partition(inst, i).threshold)) {
            return FairnessVerdict::fail({i, i, {}});
        }
    }
    return FairnessVerdict::pass();
}

std::vector<std::vector<bool>> envy_matrix(const Instance& inst, const Allocation& a)
{
    const int n = inst.num_agents();
    std::vector<std::vector<bool>> out(n, std::vector<bool>(n, false));
    for (AgentId i = 0; i < n; ++i) {
        for (AgentId h = 0; h < n; ++h) {
            out[i][h] = i != h && envies(inst, a, i, h);
        }
    }
    return out;
}

} // namespace lexfair
