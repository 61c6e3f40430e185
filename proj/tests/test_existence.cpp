#include "oracles.hpp"

#include <doctest.h>

using namespace lexfair;
using oracle::bundles;

namespace {

void check_sound(const Instance& inst, const std::optional<Allocation>& a, const FairnessCriterion& c)
{
    if (a) {
        REQUIRE(a->is_complete(inst));
        REQUIRE(is_rank_maximal(inst, *a));
        REQUIRE(satisfies(inst, *a, c));
    }
}

bool distinct_tops(const Instance& inst)
{
    std::set<GoodId> tops;
    for (AgentId i = 0; i < inst.num_agents(); ++i) {
        tops.insert(inst.ranking(i).top());
    }
    return static_cast<int>(tops.size()) == inst.num_agents();
}

} // namespace

TEST_CASE("FairnessCriterion parsing")
{
    CHECK(FairnessCriterion::parse("EF") == FairnessCriterion::ef());
    CHECK(FairnessCriterion::parse("efx") == FairnessCriterion::efx());
    CHECK(FairnessCriterion::parse("ef1") == FairnessCriterion::ef1());
    CHECK(FairnessCriterion::parse("efk:3") == FairnessCriterion::efk(3));
    CHECK(FairnessCriterion::parse("ef2") == FairnessCriterion::efk(2));
    CHECK(FairnessCriterion::parse("mms") == FairnessCriterion::mms());
    CHECK(FairnessCriterion::efk(4).name() == "efk:4");
    CHECK_THROWS_AS(FairnessCriterion::parse("efk:0"), std::invalid_argument);
    CHECK_THROWS_AS(FairnessCriterion::parse("prop"), std::invalid_argument);
}

TEST_CASE("rm_feasible_owners")
{
    const RmFeasibility f = rm_feasible_owners(oracle::example_instance(1));
    CHECK(f.owners[0] == std::vector<AgentId>{0, 1});
    CHECK(f.owners[1] == std::vector<AgentId>{2});
    CHECK(f.owners[2] == std::vector<AgentId>{2});
    const RmFeasibility same = rm_feasible_owners(identical_instance(3, 4));
    for (const auto& o : same.owners) {
        CHECK(o == std::vector<AgentId>{0, 1, 2});
    }
}

TEST_CASE("exists_ef_rm")
{
    const Instance distinct = oracle::from_rows({{0, 1, 2, 3}, {1, 2, 3, 0}, {2, 0, 1, 3}});
    const auto a = exists_ef_rm(distinct);
    REQUIRE(a.has_value());
    CHECK(is_ef(distinct, *a).holds);
    CHECK(is_rank_maximal(distinct, *a));
    CHECK_FALSE(exists_ef_rm(oracle::example_instance(1)).has_value());
    CHECK_FALSE(oracle::fair_rm_exists(oracle::example_instance(1), FairnessCriterion::ef()));
    const Instance one = identical_instance(1, 3);
    CHECK(exists_ef_rm(one) == bundles({Bundle::first_n(3)}));
}

TEST_CASE("exists_mms_rm")
{
    const Instance d = oracle::mms_not_efx_instance();
    const auto a = exists_mms_rm(d);
    REQUIRE(a.has_value());
    CHECK(is_mms(d, *a).holds);
    CHECK(is_rank_maximal(d, *a));
    for (AgentId i = 0; i < 4; ++i) {
        CHECK(a->bundle(i).intersects(d.ranking(i).prefix(3)));
    }

    for (int n = 1; n <= 4; ++n) {
        for (int m = n; m <= 6; ++m) {
            const Instance same = identical_instance(n, m);
            const auto b = exists_mms_rm(same);
            REQUIRE(b.has_value());
            CHECK(is_mms(same, *b).holds);
        }
    }
    const Instance distinct = oracle::from_rows({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
    CHECK(exists_mms_rm(distinct) == bundles({Bundle{0}, Bundle{1}, Bundle{2}}));
}

TEST_CASE("exists_ef1_rm_three")
{
    CHECK_FALSE(exists_ef1_rm_three(oracle::example_instance(1)).has_value());
    CHECK_FALSE(oracle::fair_rm_exists(oracle::example_instance(1), FairnessCriterion::ef1()));
    const Instance ex2 = oracle::example_instance(2);
    CHECK(exists_ef1_rm_three(ex2).has_value() == oracle::fair_rm_exists(ex2, FairnessCriterion::ef1()));
    const Instance distinct = oracle::from_rows({{0, 1, 2, 3}, {1, 2, 3, 0}, {2, 0, 1, 3}});
    CHECK(exists_ef1_rm_three(distinct).has_value());
    CHECK_THROWS_AS(exists_ef1_rm_three(identical_instance(2, 3)), std::invalid_argument);
}

TEST_CASE("polynomial procedures agree with the exhaustive oracle on every small profile")
{
    for (auto [n, m] : {std::pair{2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}, {3, 4}}) {
        std::uint64_t index = 0;
        ProfileEnumerator profiles(n, m);
        while (auto inst = profiles.next()) {
            if (n == 3 && m == 4 && (index++ % 11) != 0) {
                continue;
            }
            const auto ef = exists_ef_rm(*inst);
            check_sound(*inst, ef, FairnessCriterion::ef());
            REQUIRE(ef.has_value() == oracle::fair_rm_exists(*inst, FairnessCriterion::ef()));
            REQUIRE(ef.has_value() == distinct_tops(*inst));

            const auto mms = exists_mms_rm(*inst);
            check_sound(*inst, mms, FairnessCriterion::mms());
            REQUIRE(mms.has_value() == oracle::fair_rm_exists(*inst, FairnessCriterion::mms()));

            if (n == 3) {
                const auto ef1 = exists_ef1_rm_three(*inst);
                check_sound(*inst, ef1, FairnessCriterion::ef1());
                REQUIRE(ef1.has_value() == oracle::fair_rm_exists(*inst, FairnessCriterion::ef1()));
                if (const auto c = ef1_rm_three_case_analysis(*inst)) {
                    check_sound(*inst, c, FairnessCriterion::ef1());
                }
            }
        }
    }
}

TEST_CASE("solve_fair_rm fixed cases")
{
    const Instance ex = oracle::example_instance(1);
    CHECK(solve_fair_rm(ex, FairnessCriterion::efx()).status == SearchStatus::None);
    for (int n = 2; n <= 5; ++n) {
        for (int m = 1; m <= 9; ++m) {
            const Instance same = identical_instance(n, m);
            const SearchResult r = solve_fair_rm(same, FairnessCriterion::efx());
            REQUIRE(r.status == SearchStatus::Found);
            check_sound(same, r.allocation, FairnessCriterion::efx());
        }
    }
    for (int k = 1; k <= 3; ++k) {
        const Instance e = oracle::example_instance(k);
        CHECK(solve_fair_rm(e, FairnessCriterion::efk(k)).status == SearchStatus::None);
        CHECK(solve_fair_rm(e, FairnessCriterion::efk(k + 1)).status == SearchStatus::Found);
    }
}

TEST_CASE("solve_fair_rm agrees with brute force on random instances")
{
    std::mt19937_64 rng(2024);
    const std::vector<FairnessCriterion> crits = {FairnessCriterion::ef(), FairnessCriterion::efx(),
                                                  FairnessCriterion::ef1(), FairnessCriterion::efk(2),
                                                  FairnessCriterion::mms()};
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 7);
        const double phi = (rng() % 3) * 0.5;
        const Instance inst = sample_profile(n, m, phi, rng);
        for (const auto& c : crits) {
            const SearchResult r = solve_fair_rm(inst, c);
            REQUIRE(r.status != SearchStatus::Unknown);
            check_sound(inst, r.allocation, c);
            const auto b = brute_force(inst, c, true, false);
            REQUIRE((r.status == SearchStatus::Found) == b.has_value());
        }
        REQUIRE((solve_fair_rm(inst, FairnessCriterion::ef()).status == SearchStatus::Found)
                == exists_ef_rm(inst).has_value());
        REQUIRE((solve_fair_rm(inst, FairnessCriterion::mms()).status == SearchStatus::Found)
                == exists_mms_rm(inst).has_value());
        if (n == 3) {
            REQUIRE((solve_fair_rm(inst, FairnessCriterion::ef1()).status == SearchStatus::Found)
                    == exists_ef1_rm_three(inst).has_value());
        }
    }
}

TEST_CASE("solve_fair_rm reports unknown when the budget runs out")
{
    const Instance ex = oracle::example_instance(4);
    const SearchResult r = solve_fair_rm(ex, FairnessCriterion::efx(), 1);
    CHECK(r.status == SearchStatus::Unknown);
    CHECK_FALSE(r.allocation.has_value());
}

TEST_CASE("brute_force")
{
    const Instance distinct = oracle::from_rows({{0, 1}, {1, 0}});
    CHECK(brute_force(distinct, FairnessCriterion::ef(), false, false).has_value());
    for (int k = 1; k <= 3; ++k) {
        CHECK_FALSE(brute_force(oracle::example_instance(k), FairnessCriterion::efk(k), true, false).has_value());
    }
    const auto po = brute_force(identical_instance(2, 3), std::nullopt, false, true);
    REQUIRE(po.has_value());
    CHECK(is_pareto_optimal(identical_instance(2, 3), *po));
    CHECK_THROWS_AS(brute_force(identical_instance(4, 20), FairnessCriterion::ef(), true, false, 1000),
                    BudgetExceeded);
}

TEST_CASE("exists_rm_with_small_bundle")
{
    const Instance same = identical_instance(3, 6);
    const auto a = exists_rm_with_small_bundle(same);
    REQUIRE(a.has_value());
    CHECK(is_rank_maximal(same, *a));
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % 7);
        const Instance inst = oracle::random_instance(n, m, rng);
        bool expected = false;
        oracle::for_each_complete(n, m, [&](const Allocation& b) {
            if (!expected && oracle::is_rm(inst, b)) {
                for (AgentId i = 0; i < n; ++i) {
                    expected = expected || b.bundle(i).size() <= 1;
                }
            }
        });
        const auto got = exists_rm_with_small_bundle(inst);
        REQUIRE(got.has_value() == expected);
        if (got) {
            REQUIRE(is_rank_maximal(inst, *got));
        }
    }
}
