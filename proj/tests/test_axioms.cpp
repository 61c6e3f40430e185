#include "oracles.hpp"

#include <doctest.h>

using namespace lexfair;
using oracle::bundles;

namespace {

const std::vector<Axiom> kCharacterizing = {Axiom::EFX, Axiom::PO, Axiom::StrategyProof, Axiom::NonBossy,
                                            Axiom::Neutral};

} // namespace

TEST_CASE("algorithm2 is SP, GSP, non-bossy and neutral on small domains")
{
    for (const auto& sigma : {std::vector<AgentId>{0, 1}, std::vector<AgentId>{1, 0}}) {
        const OutcomeTable t(algorithm2_mechanism(sigma), 2, 3);
        CHECK(t.size() == 36);
        for (Axiom a : kCharacterizing) {
            CHECK(check_axiom(t, a).holds);
        }
        CHECK(check_group_strategyproof(t, 2).holds);
    }
}

TEST_CASE("constant mechanism is SP and non-bossy")
{
    const Mechanism f = constant_mechanism(bundles({Bundle{0}, Bundle{1, 2}}));
    CHECK(check_strategyproof(f, 2, 3).holds);
    CHECK(check_non_bossy(f, 2, 3).holds);
    CHECK(check_group_strategyproof(f, 2, 3, 2).holds);
}

TEST_CASE("single-agent coalitions match strategyproofness")
{
    for (const Mechanism& f : {algorithm2_mechanism({0, 1}), greedy_rm_mechanism(), sdq_mechanism({0, 1}, {2, 1})}) {
        const OutcomeTable t(f, 2, 3);
        CHECK(check_group_strategyproof(t, 1).holds == check_strategyproof(t).holds);
    }
}

TEST_CASE("rank-maximal mechanism is manipulable on the example profile")
{
    const Mechanism f = greedy_rm_mechanism();
    const Instance ex = oracle::example_instance(1);
    const AxiomReport r = check_strategyproof_at(f, ex);
    REQUIRE_FALSE(r.holds);
    REQUIRE(r.counterexample.has_value());
    const Counterexample& c = *r.counterexample;
    REQUIRE(c.deviators.size() == 1);
    const AgentId liar = c.deviators[0];
    CHECK(oracle::strictly_prefers(ex.ranking(liar), c.after.bundle(liar), c.before.bundle(liar)));
    CHECK(replay_confirms(f, Axiom::StrategyProof, c));
    const Instance lie = ex.with_ranking(1, Ranking({2, 0, 1}));
    CHECK(lex_compare(ex.ranking(1), f(lie).bundle(1), f(ex).bundle(1)) == LexOrder::XbeatsY);
}

TEST_CASE("greedy rank-maximal mechanism neutrality is recorded")
{
    const OutcomeTable t(greedy_rm_mechanism(), 2, 3);
    const AxiomReport r = check_neutral(t);
    CHECK(r.holds);
}

TEST_CASE("each fixture fails exactly its designated axiom")
{
    std::vector<Fixture> all = minimality_fixtures();
    for (const auto& f : mms_minimality_fixtures()) {
        all.push_back(f);
    }
    for (const Fixture& fx : all) {
        CAPTURE(fx.name);
        const OutcomeTable t(fx.mechanism, fx.n, fx.m);
        for (Axiom a : {fx.fairness, Axiom::PO, Axiom::StrategyProof, Axiom::NonBossy, Axiom::Neutral}) {
            CAPTURE(axiom_name(a));
            const AxiomReport r = check_axiom(t, a);
            if (fx.name == "mms-drop-po" && a == Axiom::StrategyProof) {
                CHECK_FALSE(r.holds);
                continue;
            }
            CHECK(r.holds == (a != fx.violated));
            if (r.counterexample) {
                CHECK(replay_confirms(fx.mechanism, a, *r.counterexample));
            }
        }
    }
}

TEST_CASE("drop-efx fixture envies the double-good agent under identical preferences")
{
    const auto fx = find_fixture("drop-efx");
    REQUIRE(fx.has_value());
    const Instance same = identical_instance(fx->n, fx->m);
    const Allocation a = fx->mechanism(same);
    CHECK(a.bundle(0).size() == 2);
    CHECK_FALSE(is_efx(same, a).holds);
}

TEST_CASE("drop-po fixture leaves goods unassigned")
{
    const auto fx = find_fixture("drop-po");
    REQUIRE(fx.has_value());
    const Instance same = identical_instance(fx->n, fx->m);
    CHECK_FALSE(fx->mechanism(same).is_complete(same));
}

TEST_CASE("drop-sp violation has the last agent pretending to envy")
{
    const auto fx = find_fixture("drop-sp");
    REQUIRE(fx.has_value());
    const AxiomReport r = check_strategyproof(fx->mechanism, fx->n, fx->m);
    REQUIRE(r.counterexample.has_value());
    CHECK(r.counterexample->deviators == std::vector<AgentId>{fx->n - 1});
    const Instance& lie = r.counterexample->reported;
    CHECK(envies(lie, run_picking_sequence(lie, identity_order(fx->n)), fx->n - 1, fx->n - 2));
}

TEST_CASE("drop-nonbossy violation on its documented profile")
{
    const auto fx = find_fixture("drop-nonbossy");
    REQUIRE(fx.has_value());
    const Instance truthful = identical_instance(4, 4);
    const Instance lie = truthful.with_ranking(1, Ranking({1, 0, 2, 3}));
    const Allocation before = fx->mechanism(truthful);
    const Allocation after = fx->mechanism(lie);
    CHECK(before.bundle(1) == after.bundle(1));
    CHECK(before != after);
}

TEST_CASE("SP and non-bossy imply group strategyproofness on audited mechanisms")
{
    std::vector<Mechanism> mechs = {algorithm2_mechanism({0, 1}), sdq_mechanism({1, 0}, {2, 1}),
                                    constant_mechanism(bundles({Bundle{2}, Bundle{0, 1}}))};
    for (const auto& fx : minimality_fixtures()) {
        if (fx.n == 2 && fx.m == 3) {
            mechs.push_back(fx.mechanism);
        }
    }
    for (const Mechanism& f : mechs) {
        CAPTURE(f.name);
        const OutcomeTable t(f, 2, 3);
        if (check_strategyproof(t).holds && check_non_bossy(t).holds) {
            CHECK(check_group_strategyproof(t, 2).holds);
        }
    }
}

TEST_CASE("bossy strategyproof fixture is not group strategyproof")
{
    const auto fx = find_fixture("drop-nonbossy");
    REQUIRE(fx.has_value());
    const OutcomeTable t(fx->mechanism, fx->n, fx->m);
    CHECK(check_strategyproof(t).holds);
    const AxiomReport r = check_group_strategyproof(t, 2);
    CHECK_FALSE(r.holds);
    REQUIRE(r.counterexample.has_value());
    CHECK(replay_confirms(fx->mechanism, Axiom::GroupStrategyProof, *r.counterexample));
}

TEST_CASE("SDQ mechanisms are PO, SP, non-bossy and neutral")
{
    for (const auto& quotas : {std::vector<int>{3, 0}, {2, 1}, {1, 2}, {0, 3}}) {
        const OutcomeTable t(sdq_mechanism({0, 1}, quotas), 2, 3);
        for (Axiom a : {Axiom::PO, Axiom::StrategyProof, Axiom::NonBossy, Axiom::Neutral}) {
            CHECK(check_axiom(t, a).holds);
        }
        CHECK(check_profilewise(t, Axiom::EFX).holds == (quotas == std::vector<int>{1, 2}));
        CHECK(check_profilewise(t, Axiom::MMS).holds == (quotas == std::vector<int>{1, 2}));
    }
}

TEST_CASE("audits are independent of thread count")
{
    const auto fx = find_fixture("drop-sp");
    REQUIRE(fx.has_value());
    AuditOptions one;
    AuditOptions four;
    four.threads = 4;
    const OutcomeTable t(fx->mechanism, fx->n, fx->m);
    for (Axiom a : {Axiom::StrategyProof, Axiom::NonBossy, Axiom::Neutral, Axiom::PO}) {
        const AxiomReport x = check_axiom(t, a, one);
        const AxiomReport y = check_axiom(t, a, four);
        REQUIRE(x.holds == y.holds);
        if (x.counterexample) {
            CHECK(x.counterexample->truthful == y.counterexample->truthful);
            CHECK(x.counterexample->reported == y.counterexample->reported);
        }
    }
}

TEST_CASE("audit budgets are hard errors")
{
    AuditOptions tiny;
    tiny.work_budget = 10;
    const OutcomeTable t(algorithm2_mechanism({0, 1}), 2, 3);
    CHECK_THROWS_AS(check_strategyproof(t, tiny), BudgetExceeded);
    AuditOptions few;
    few.profile_budget = 10;
    CHECK_THROWS_AS(OutcomeTable(algorithm2_mechanism({0, 1}), 2, 3, few), BudgetExceeded);
}

TEST_CASE("outcome table indexing")
{
    const OutcomeTable t(algorithm2_mechanism({0, 1, 2}), 3, 3);
    CHECK(t.size() == 216);
    for (std::uint64_t p = 0; p < t.size(); p += 17) {
        const Instance inst = t.instance(p);
        CHECK(t.index_of(inst) == p);
        CHECK(t.outcome(p) == algorithm2(inst, {0, 1, 2}));
        for (AgentId i = 0; i < 3; ++i) {
            const std::uint64_t q = t.with_digit(p, i, 5);
            CHECK(t.digit(q, i) == 5);
            CHECK(t.instance(q) == inst.with_ranking(i, t.domain().at(5)));
        }
    }
}
