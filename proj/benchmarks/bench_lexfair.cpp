#include "lexfair/lexfair.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace lexfair;

namespace {

Instance uniform_profile(int n, int m, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return sample_profile(n, m, 1.0, rng);
}

void BM_LexCompare(benchmark::State& state)
{
    const int m = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    const Ranking r = mallows_sample({Ranking::identity(m), 1.0}, rng);
    Bundle x;
    Bundle y;
    for (GoodId g = 0; g < m; ++g) {
        (rng() & 1 ? x : y).insert(g);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(lex_compare(r, x, y));
    }
}
BENCHMARK(BM_LexCompare)->Arg(8)->Arg(32)->Arg(128);

void BM_IsEfx(benchmark::State& state)
{
    const int m = static_cast<int>(state.range(0));
    const Instance inst = uniform_profile(5, m, 2);
    const Allocation a = greedy_rank_maximal(inst);
    for (auto _ : state) {
        benchmark::DoNotOptimize(is_efx(inst, a));
    }
}
BENCHMARK(BM_IsEfx)->Arg(20)->Arg(100);

void BM_SolveFairRm(benchmark::State& state)
{
    const int m = static_cast<int>(state.range(0));
    const FairnessCriterion crit = state.range(1) == 0 ? FairnessCriterion::efx() : FairnessCriterion::ef1();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const Instance inst = uniform_profile(5, m, ++seed);
        benchmark::DoNotOptimize(solve_fair_rm(inst, crit));
    }
}
BENCHMARK(BM_SolveFairRm)->Args({10, 0})->Args({20, 0})->Args({10, 1})->Args({20, 1});

void BM_ExistsEfRm(benchmark::State& state)
{
    const Instance inst = uniform_profile(5, 100, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exists_ef_rm(inst));
    }
}
BENCHMARK(BM_ExistsEfRm);

void BM_StrategyproofAudit(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const OutcomeTable t(algorithm2_mechanism(identity_order(n)), n, 3);
        benchmark::DoNotOptimize(check_strategyproof(t));
    }
}
BENCHMARK(BM_StrategyproofAudit)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_MallowsSample(benchmark::State& state)
{
    const int m = static_cast<int>(state.range(0));
    const MallowsParams p{Ranking::identity(m), 0.5};
    std::mt19937_64 rng(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mallows_sample(p, rng));
    }
}
BENCHMARK(BM_MallowsSample)->Arg(10)->Arg(100);

} // namespace

BENCHMARK_MAIN();
