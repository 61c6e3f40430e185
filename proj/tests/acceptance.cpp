#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

using namespace lexfair;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> run;
};

int workers()
{
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

std::vector<std::vector<AgentId>> permutations(int n)
{
    std::vector<std::vector<AgentId>> out;
    std::vector<AgentId> p = identity_order(n);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// Every sequence of `length` entries drawn from `alphabet`.
std::vector<PickingSequence> sequences(const std::vector<AgentId>& alphabet, int length)
{
    std::vector<PickingSequence> out = {{}};
    for (int step = 0; step < length; ++step) {
        std::vector<PickingSequence> next;
        for (const auto& s : out) {
            for (AgentId a : alphabet) {
                next.push_back(s);
                next.back().push_back(a);
            }
        }
        out = std::move(next);
    }
    return out;
}

std::vector<TauPolicy> tau_policies(const std::vector<AgentId>& unenvied, int n, int m)
{
    std::vector<TauPolicy> out = {TauPolicy::round_robin()};
    for (AgentId u : unenvied) {
        out.push_back(TauPolicy::all_to(u));
    }
    if (m - n <= 2) {
        for (auto& s : sequences(unenvied, std::max(0, m - n))) {
            out.push_back(TauPolicy::explicit_sequence(std::move(s)));
        }
    }
    return out;
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome alg1_forward()
{
    std::uint64_t outputs = 0;
    for (int n : {2, 3}) {
        for (int m = 1; m <= 4; ++m) {
            ProfileEnumerator profiles(n, m);
            while (auto inst = profiles.next()) {
                for (const auto& sigma : permutations(n)) {
                    const auto unenvied = algorithm1_trace(*inst, sigma, TauPolicy::round_robin()).unenvied;
                    for (const auto& tau : tau_policies(unenvied, n, m)) {
                        const Allocation a = algorithm1(*inst, sigma, tau);
                        ++outputs;
                        if (!is_efx(*inst, a).holds || !is_pareto_optimal(*inst, a) || !oracle::is_efx(*inst, a)
                            || !a.is_complete(*inst)) {
                            return {false, "output fails EFX or PO on n=" + std::to_string(n) + ", m="
                                               + std::to_string(m) + ":\n" + serialize_instance(*inst)};
                        }
                    }
                }
            }
        }
    }
    return {true, std::to_string(outputs) + " outputs checked"};
}

Outcome alg1_converse()
{
    std::uint64_t profiles_checked = 0;
    std::uint64_t members = 0;
    for (int n : {2, 3}) {
        for (int m = 1; m <= 4; ++m) {
            ProfileEnumerator profiles(n, m);
            while (auto inst = profiles.next()) {
                std::set<Allocation> produced;
                for (const auto& sigma : permutations(n)) {
                    const auto unenvied = algorithm1_trace(*inst, sigma, TauPolicy::round_robin()).unenvied;
                    for (auto& s : sequences(unenvied, std::max(0, m - n))) {
                        produced.insert(algorithm1(*inst, sigma, TauPolicy::explicit_sequence(std::move(s))));
                    }
                }
                std::set<Allocation> expected;
                oracle::for_each_complete(n, m, [&](const Allocation& a) {
                    if (oracle::is_efx(*inst, a) && oracle::is_po(*inst, a)) {
                        expected.insert(a);
                    }
                });
                if (produced != expected) {
                    return {false, "output set differs from the EFX+PO set (" + std::to_string(produced.size())
                                       + " vs " + std::to_string(expected.size()) + ") on\n"
                                       + serialize_instance(*inst)};
                }
                for (const Allocation& a : expected) {
                    const auto d = decompose_efx_po(*inst, a);
                    if (!d || algorithm1(*inst, d->sigma, TauPolicy::explicit_sequence(d->tau)) != a) {
                        return {false, "decomposition does not round-trip on\n" + serialize_instance(*inst)
                                           + serialize_allocation(*inst, a)};
                    }
                }
                ++profiles_checked;
                members += expected.size();
            }
        }
    }
    return {true, std::to_string(profiles_checked) + " profiles, " + std::to_string(members) + " allocations"};
}

std::vector<std::vector<int>> compositions(int total, int parts)
{
    if (parts == 1) {
        return {{total}};
    }
    std::vector<std::vector<int>> out;
    for (int first = 0; first <= total; ++first) {
        for (auto& rest : compositions(total - first, parts - 1)) {
            rest.insert(rest.begin(), first);
            out.push_back(std::move(rest));
        }
    }
    return out;
}

Outcome alg2_and_sdq()
{
    AuditOptions opts;
    opts.threads = workers();
    int audits = 0;
    int sdq_checked = 0;
    for (int n : {2, 3}) {
        const int m = 3;
        for (const auto& sigma : permutations(n)) {
            const OutcomeTable table(algorithm2_mechanism(sigma), n, m, opts);
            for (Axiom ax : {Axiom::EFX, Axiom::PO, Axiom::StrategyProof, Axiom::NonBossy, Axiom::Neutral}) {
                ++audits;
                if (!check_axiom(table, ax, opts).holds) {
                    return {false, "alg2 fails " + axiom_name(ax) + " at n=" + std::to_string(n)};
                }
            }
        }
        std::vector<int> allowed(n, 1);
        allowed.back() = m - n + 1;
        for (const auto& q : compositions(m, n)) {
            if (q == allowed) {
                continue;
            }
            for (const auto& sigma : permutations(n)) {
                const OutcomeTable table(sdq_mechanism(sigma, q), n, m, opts);
                ++sdq_checked;
                if (check_profilewise(table, Axiom::EFX, opts).holds) {
                    return {false, table.mechanism_name() + " passes EFX at n=" + std::to_string(n)};
                }
            }
        }
    }
    return {true, std::to_string(audits) + " alg2 audits, " + std::to_string(sdq_checked) + " sdq variants fail EFX"};
}

Outcome fixtures()
{
    AuditOptions opts;
    opts.threads = workers();
    std::ostringstream detail;
    for (const Fixture& f : minimality_fixtures()) {
        const OutcomeTable table(f.mechanism, f.n, f.m, opts);
        for (Axiom ax : {f.fairness, Axiom::PO, Axiom::StrategyProof, Axiom::NonBossy, Axiom::Neutral}) {
            const AxiomReport r = check_axiom(table, ax, opts);
            if (r.holds == (ax == f.violated)) {
                return {false, f.name + ": " + axiom_name(ax) + (r.holds ? " holds" : " violated")};
            }
            if (!r.holds && (!r.counterexample || !replay_confirms(f.mechanism, ax, *r.counterexample))) {
                return {false, f.name + ": counterexample does not replay"};
            }
        }
        detail << f.name << ' ';
    }
    return {true, detail.str() + "each fail only their axiom"};
}

Outcome examples()
{
    for (int k = 1; k <= 3; ++k) {
        const Instance inst = oracle::example_instance(k);
        if (check_strategyproof_at(greedy_rm_mechanism(), inst).holds) {
            return {false, "no manipulation found for k=" + std::to_string(k)};
        }
        if (solve_fair_rm(inst, FairnessCriterion::efk(k)).status != SearchStatus::None) {
            return {false, "EF" + std::to_string(k) + "+RM not refuted for k=" + std::to_string(k)};
        }
        const SearchResult next = solve_fair_rm(inst, FairnessCriterion::efk(k + 1));
        if (next.status != SearchStatus::Found || !oracle::is_ef_k(inst, *next.allocation, k + 1)
            || !oracle::is_rm(inst, *next.allocation)) {
            return {false, "EF" + std::to_string(k + 1) + "+RM not found for k=" + std::to_string(k)};
        }
        if (oracle::fair_rm_exists(inst, FairnessCriterion::efk(k))) {
            return {false, "oracle finds EF" + std::to_string(k) + "+RM for k=" + std::to_string(k)};
        }
    }
    return {true, "k = 1, 2, 3"};
}

std::string poly_disagreement(const Instance& inst)
{
    struct Case {
        FairnessCriterion crit;
        std::optional<Allocation> poly;
    };
    std::vector<Case> cases = {{FairnessCriterion::ef(), exists_ef_rm(inst)},
                               {FairnessCriterion::mms(), exists_mms_rm(inst)}};
    if (inst.num_agents() == 3) {
        cases.push_back({FairnessCriterion::ef1(), exists_ef1_rm_three(inst)});
    }
    for (const auto& c : cases) {
        const bool brute = brute_force(inst, c.crit, true, false).has_value();
        if (brute != c.poly.has_value()) {
            return c.crit.name() + " verdict differs on\n" + serialize_instance(inst);
        }
        if (c.poly && (!satisfies(inst, *c.poly, c.crit) || !oracle::is_rm(inst, *c.poly)
                       || (c.crit != FairnessCriterion::mms() && !oracle::satisfies(inst, *c.poly, c.crit)))) {
            return c.crit.name() + " witness invalid on\n" + serialize_instance(inst);
        }
    }
    return {};
}

Outcome poly_vs_brute()
{
    std::uint64_t count = 0;
    ProfileEnumerator profiles(3, 4);
    while (auto inst = profiles.next()) {
        if (auto d = poly_disagreement(*inst); !d.empty()) {
            return {false, d};
        }
        ++count;
    }
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 7);
        const Instance inst = oracle::random_instance(n, m, rng);
        if (auto d = poly_disagreement(inst); !d.empty()) {
            return {false, d};
        }
        ++count;
    }
    return {true, std::to_string(count) + " instances, zero disagreements"};
}

std::vector<TruthAssignment> satisfying(const SatInstance& sat)
{
    std::vector<TruthAssignment> out;
    for (std::uint32_t mask = 0; mask < (1U << sat.r); ++mask) {
        TruthAssignment t(sat.r);
        for (int v = 0; v < sat.r; ++v) {
            t[v] = (mask >> v) & 1U;
        }
        if (satisfies(sat, t)) {
            out.push_back(t);
        }
    }
    return out;
}

Outcome sat_equivalence()
{
    std::mt19937_64 rng(7);
    int yes = 0;
    int no = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const SatInstance sat = random_223sat(trial < 10 ? 3 : 6, rng);
        const SatReduction red = reduce_sat(sat);
        if (oracle::rendered_rows(red.instance) != oracle::sat_rows(sat)) {
            return {false, "reduced rows differ from the construction"};
        }
        const bool satisfiable = sat_brute_force(sat).has_value();
        const SearchResult r = solve_fair_rm(red.instance, FairnessCriterion::efx());
        if (r.status == SearchStatus::Unknown) {
            return {false, "search budget exhausted on formula " + std::to_string(trial)};
        }
        if ((r.status == SearchStatus::Found) != satisfiable) {
            return {false, "equivalence fails on\n" + serialize_dimacs(sat)};
        }
        if (r.allocation && !satisfies(sat, decode_sat(red, *r.allocation))) {
            return {false, "found allocation decodes to a falsifying assignment"};
        }
        for (const auto& t : satisfying(sat)) {
            const Allocation a = encode_sat_assignment(red, t);
            if (decode_sat(red, a) != t || !oracle::is_efx(red.instance, a) || !oracle::is_rm(red.instance, a)) {
                return {false, "encode/decode mismatch on\n" + serialize_dimacs(sat)};
            }
        }
        (satisfiable ? yes : no)++;
    }
    return {true, std::to_string(yes) + " satisfiable, " + std::to_string(no) + " unsatisfiable"};
}

Outcome pit_structure()
{
    const TripartiteGraph triangle = parse_graph("parts 1\nedge w1 x1\nedge x1 y1\nedge w1 y1\n");
    const std::vector<std::tuple<std::string, TripartiteGraph, int>> goldens = {
        {"pit_q1_k1.txt", triangle, 1},
        {"pit_q2_k1.txt", complete_tripartite(2), 1},
        {"pit_q2_k2.txt", complete_tripartite(2), 2},
    };
    for (const auto& [file, g, k] : goldens) {
        const PitReduction red = reduce_pit(g, k);
        const int q = g.q;
        const int t = static_cast<int>(g.non_edges().size());
        const int group = (k + 2) * q + 1;
        if (red.instance.num_agents() != q + t * group || red.instance.num_goods() != (k + 2) * q + t * group) {
            return {false, file + ": counts differ from the formulas"};
        }
        if (oracle::rendered_rows(red.instance) != oracle::pit_rows(g, k)) {
            return {false, file + ": rows differ from the construction"};
        }
        if (serialize_instance(red.instance) != read_file(std::string(LEXFAIR_TEST_DATA) + "/" + file)) {
            return {false, file + ": golden file differs"};
        }
    }
    TripartiteGraph deleted = complete_tripartite(2);
    deleted.edges.erase(deleted.edges.begin());
    std::ostringstream detail;
    for (const TripartiteGraph& g : {complete_tripartite(2), deleted}) {
        const PitReduction red = reduce_pit(g, 1);
        const auto partition = pit_brute_force(g);
        const SearchResult r = solve_fair_rm(red.instance, FairnessCriterion::ef1());
        if (r.status == SearchStatus::Unknown) {
            return {false, "search budget exhausted on a graph with " + std::to_string(g.edges.size()) + " edges"};
        }
        if ((r.status == SearchStatus::Found) != partition.has_value()) {
            return {false, "equivalence fails on\n" + serialize_graph(g)};
        }
        if (r.allocation && !is_triangle_partition(g, decode_pit(red, *r.allocation))) {
            return {false, "found allocation does not decode to a triangle partition"};
        }
        if (partition) {
            const Allocation a = encode_pit(red, *partition);
            if (!oracle::is_ef_k(red.instance, a, 1) || !oracle::is_rm(red.instance, a)) {
                return {false, "encoded partition is not EF1+RM"};
            }
        }
        detail << g.edges.size() << " edges: " << (partition ? "yes" : "no") << "; ";
    }
    return {true, "goldens match; " + detail.str()};
}

Outcome mallows_frequencies()
{
    const int samples = 100000;
    std::mt19937_64 rng(20240601);
    int checks = 0;
    double worst = 0;
    std::string failures;
    for (int m : {3, 4}) {
        const RankingDomain dom(m);
        for (double phi : {0.25, 0.5, 0.75, 1.0}) {
            const MallowsParams p{Ranking::identity(m), phi};
            std::vector<int> counts(dom.size(), 0);
            for (int s = 0; s < samples; ++s) {
                ++counts[dom.index_of(mallows_sample(p, rng))];
            }
            for (std::uint64_t i = 0; i < dom.size(); ++i) {
                const double pr = mallows_pmf(p, dom.at(i));
                const double sd = std::sqrt(samples * pr * (1 - pr));
                const double z = std::abs(counts[i] - samples * pr) / sd;
                worst = std::max(worst, z);
                ++checks;
                if (z > 3) {
                    failures += " m=" + std::to_string(m) + " phi=" + fmt("%g", phi) + " z=" + fmt("%.2f", z);
                }
            }
        }
    }
    if (!failures.empty()) {
        return {false, "outside 3 sigma:" + failures};
    }
    return {true, std::to_string(checks) + " rankings, max |z| = " + fmt("%.2f", worst)};
}

Outcome ef_rm_point()
{
    SweepConfig cfg;
    cfg.n = 5;
    cfg.ms = {100};
    cfg.phis = {1.0};
    cfg.trials = 1000;
    cfg.criteria = {"ef"};
    cfg.seed = 1;
    cfg.jobs = workers();
    const SweepRecord r = run_sweep(cfg).front();
    const double expected = ef_rm_closed_form(5, 100);
    const double reference = 0.96 * 0.97 * 0.98 * 0.99;
    const bool pass = r.unknown_count == 0 && std::abs(expected - reference) < 1e-12
                      && std::abs(r.fraction - expected) <= 0.04;
    return {pass, "fraction " + fmt("%.4f", r.fraction) + " vs closed form " + fmt("%.4f", expected)};
}

Outcome sweep_reproduction()
{
    SweepConfig cfg;
    cfg.n = 5;
    for (int m = 5; m <= 20; ++m) {
        cfg.ms.push_back(m);
    }
    cfg.phis = {0.0, 0.5, 1.0};
    cfg.trials = 200;
    cfg.seed = 11;
    cfg.search_only = true;
    cfg.jobs = workers();
    const auto records = run_sweep(cfg);
    cfg.jobs = std::max(1, workers() / 2);
    const std::string again = sweep_csv(run_sweep(cfg));
    if (sweep_csv(records) != again) {
        return {false, "CSV differs between runs"};
    }
    std::map<std::pair<double, int>, std::map<std::string, double>> f;
    int unknown = 0;
    for (const auto& r : records) {
        f[{r.phi, r.m}][r.criterion] = r.fraction;
        unknown += r.unknown_count;
    }
    for (auto& [key, v] : f) {
        const std::string at = " at phi=" + fmt("%g", key.first) + ", m=" + std::to_string(key.second);
        if (key.first == 0.0 && (v["efx"] != 1.0 || v["ef"] != 0.0)) {
            return {false, "identical preferences give EFX " + fmt("%g", v["efx"]) + ", EF " + fmt("%g", v["ef"]) + at};
        }
        if (!(v["ef"] <= v["efx"] && v["efx"] <= v["ef1"] && v["efx"] <= v["mms"])) {
            return {false, "chain broken" + at};
        }
    }
    return {true, std::to_string(f.size()) + " grid points, " + std::to_string(unknown) + " unknown verdicts"};
}

Outcome incomparability_examples()
{
    using oracle::bundles;
    const Instance mixed = oracle::mms_not_efx_instance();
    const Allocation a = bundles({Bundle{0, 1}, Bundle{2}, Bundle{3}, Bundle{4}});
    const Instance same = identical_instance(4, 5);
    const Allocation b = bundles({Bundle{3}, Bundle{0, 4}, Bundle{1}, Bundle{2}});
    const bool first = is_mms(mixed, a).holds && oracle::is_mms(mixed, a) && !is_efx(mixed, a).holds
                       && !oracle::is_efx(mixed, a) && !is_ef_k(mixed, a, 1).holds && !oracle::is_ef_k(mixed, a, 1)
                       && envies(mixed, a, 1, 0);
    const bool second = is_ef_k(same, b, 1).holds && oracle::is_ef_k(same, b, 1) && !is_mms(same, b).holds
                        && !oracle::is_mms(same, b);
    return {first && second, std::string("MMS-not-EFX ") + (first ? "ok" : "wrong") + ", EF1-not-MMS "
                                 + (second ? "ok" : "wrong")};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria = {
        {1, "efx-po-family-outputs-are-efx-po", 120, alg1_forward},
        {2, "efx-po-family-covers-every-efx-po-allocation", 300, alg1_converse},
        {3, "alg2-axioms-and-sdq-quotas", 300, alg2_and_sdq},
        {4, "axiom-minimality-fixtures", 120, fixtures},
        {5, "manipulation-and-efk-examples", 10, examples},
        {6, "polynomial-procedures-match-brute-force", 600, poly_vs_brute},
        {7, "sat-reduction-equivalence", 900, sat_equivalence},
        {8, "pit-reduction-structure-and-equivalence", 1800, pit_structure},
        {9, "mallows-sampler-frequencies", 120, mallows_frequencies},
        {10, "ef-rm-fraction-at-m100", 60, ef_rm_point},
        {11, "reduced-scale-sweep", 3600, sweep_reproduction},
        {12, "mms-ef1-incomparability-examples", 1, incomparability_examples},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::atoi(argv[i]));
    }
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.contains(c.id)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) {
            o.pass = false;
            o.detail += "; over the time limit";
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %02d %s (%.1fs / %gs) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    c.limit_seconds, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
