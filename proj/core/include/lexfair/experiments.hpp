#pragma once

#include "lexfair/existence.hpp"
#include "lexfair/model.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace lexfair {

/// Number of discordant pairs. Throws std::invalid_argument on different sizes.
int kendall_tau(const Ranking& a, const Ranking& b);

struct MallowsParams {
    Ranking reference;
    double phi = 1.0; ///< in [0, 1]
};

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double unit_uniform(std::mt19937_64& rng);

/// Exact sample by repeated insertion: the j-th reference item is inserted at
/// position i <= j with probability phi^(j-i) / (1 + phi + ... + phi^(j-1)).
Ranking mallows_sample(const MallowsParams& params, std::mt19937_64& rng);

/// phi^d / Z with Z summed over all rankings. Throws BudgetExceeded for m > 8.
double mallows_pmf(const MallowsParams& params, const Ranking& r);

/// Probability that n uniformly random rankings of m goods have distinct tops.
double ef_rm_closed_form(int n, int m);

/// Seed of the RNG stream for one trial of one grid point.
std::uint64_t trial_seed(std::uint64_t seed, double phi, int m, int trial);

/// Profile of n Mallows rankings around g1 > ... > gm.
Instance sample_profile(int n, int m, double phi, std::mt19937_64& rng);

struct SweepConfig {
    int n = 5;
    std::vector<int> ms;
    std::vector<double> phis;
    int trials = 100;
    /// ef, efx, ef1, efk:<k>, mms, good
    std::vector<std::string> criteria = {"ef", "efx", "ef1", "mms"};
    std::uint64_t seed = 0;
    std::uint64_t node_budget = kDefaultNodeBudget;
    int jobs = 1;
    /// Decide ef, efx, ef1, efk and mms with the exact search only.
    bool search_only = false;
};

struct SweepRecord {
    double phi = 0;
    int m = 0;
    int n = 0;
    std::string criterion;
    int trials = 0;
    int exists_count = 0;
    int unknown_count = 0;
    /// exists_count / (trials - unknown_count); 0 when every trial is unknown.
    double fraction = 0;
    std::uint64_t seed = 0;
};

enum class Verdict { Exists, None, Unknown };

/// Decides one criterion on one instance: polynomial procedures for ef, mms,
/// good and three-agent ef1; the exact search otherwise, or always when
/// `search_only` is set. "good" asks for a rank-maximal allocation giving some
/// agent at most one good.
Verdict decide(const Instance& inst, const std::string& criterion, std::uint64_t node_budget,
               bool search_only = false);

/// Deterministic for a given config whatever `jobs` is.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

std::string sweep_csv(const std::vector<SweepRecord>& records);
void write_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::vector<SweepRecord> parse_sweep_csv(std::string_view text);

/// One CSV table per phi: a column of m values plus one fraction column per criterion.
std::map<double, std::string> plot_series(const std::vector<SweepRecord>& records);

} // namespace lexfair
