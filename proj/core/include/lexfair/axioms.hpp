#pragma once

#include "lexfair/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lexfair {

/// A deterministic mapping from profiles to allocations.
struct Mechanism {
    std::string name;
    std::function<Allocation(const Instance&)> run;

    Allocation operator()(const Instance& inst) const { return run(inst); }
};

Mechanism algorithm2_mechanism(std::vector<AgentId> sigma);
Mechanism sdq_mechanism(std::vector<AgentId> sigma, std::vector<int> quotas);
/// Rank-maximal, ties broken toward the lowest agent index.
Mechanism greedy_rm_mechanism();
/// Returns `fixed` whatever the reports.
Mechanism constant_mechanism(Allocation fixed);

enum class Axiom { StrategyProof, GroupStrategyProof, NonBossy, Neutral, EFX, PO, MMS };

std::string axiom_name(Axiom a);

struct Counterexample {
    Instance truthful;
    Instance reported;
    /// Agents whose reports differ between `truthful` and `reported`. For group
    /// strategyproofness the whole coalition, which may include truthful members.
    std::vector<AgentId> deviators;
    Allocation before;
    Allocation after;
    /// Neutrality only: relabeling[g] is the image of good g.
    std::vector<GoodId> relabeling;
};

struct AxiomReport {
    Axiom axiom = Axiom::StrategyProof;
    bool holds = true;
    std::optional<Counterexample> counterexample;
};

/// Work cap for one audit, counted in outcome comparisons.
inline constexpr std::uint64_t kDefaultAuditBudget = 500'000'000;

struct AuditOptions {
    std::uint64_t profile_budget = kDefaultProfileBudget;
    std::uint64_t work_budget = kDefaultAuditBudget;
    int threads = 1;
};

/// The mechanism's outcome on every profile of L^n over m goods, computed once
/// so each axiom check is a sequence of lookups.
class OutcomeTable {
public:
    OutcomeTable(const Mechanism& f, int n, int m, const AuditOptions& opts = {});

    const std::string& mechanism_name() const { return name_; }
    int num_agents() const { return n_; }
    int num_goods() const { return m_; }
    std::uint64_t size() const { return outcomes_.size(); }
    const RankingDomain& domain() const { return profiles_.domain(); }

    const Allocation& outcome(std::uint64_t profile) const { return outcomes_[profile]; }
    Instance instance(std::uint64_t profile) const { return profiles_.at(profile); }
    /// Index of agent i's ranking within `profile`.
    std::uint64_t digit(std::uint64_t profile, AgentId i) const;
    /// `profile` with agent i's ranking replaced by domain ranking `r`.
    std::uint64_t with_digit(std::uint64_t profile, AgentId i, std::uint64_t r) const;
    std::uint64_t index_of(const Instance& inst) const;

private:
    std::string name_;
    int n_;
    int m_;
    ProfileEnumerator profiles_;
    std::vector<std::uint64_t> weights_;
    std::vector<Allocation> outcomes_;
};

/// Throws BudgetExceeded when a check needs more than opts.work_budget comparisons.
AxiomReport check_strategyproof(const OutcomeTable& t, const AuditOptions& opts = {});
/// Coalitions of 1..max_coalition agents misreport jointly; a violation makes
/// every member weakly better and one strictly better.
AxiomReport check_group_strategyproof(const OutcomeTable& t, int max_coalition, const AuditOptions& opts = {});
AxiomReport check_non_bossy(const OutcomeTable& t, const AuditOptions& opts = {});
AxiomReport check_neutral(const OutcomeTable& t, const AuditOptions& opts = {});
/// EFX, PO or MMS on every outcome.
AxiomReport check_profilewise(const OutcomeTable& t, Axiom property, const AuditOptions& opts = {});
AxiomReport check_axiom(const OutcomeTable& t, Axiom a, const AuditOptions& opts = {});

AxiomReport check_strategyproof(const Mechanism& f, int n, int m, const AuditOptions& opts = {});
AxiomReport check_group_strategyproof(const Mechanism& f, int n, int m, int max_coalition,
                                      const AuditOptions& opts = {});
AxiomReport check_non_bossy(const Mechanism& f, int n, int m, const AuditOptions& opts = {});
AxiomReport check_neutral(const Mechanism& f, int n, int m, const AuditOptions& opts = {});

/// Single-profile strategyproofness: every agent tries every misreport.
AxiomReport check_strategyproof_at(const Mechanism& f, const Instance& inst);

/// Replays a counterexample against the mechanism and confirms the violation.
bool replay_confirms(const Mechanism& f, Axiom a, const Counterexample& c);

/// A mechanism that keeps all but one of the characterizing properties.
struct Fixture {
    std::string name;
    Mechanism mechanism;
    Axiom violated;
    int n;
    int m;
    /// EFX for the main characterization, MMS for the maximin variant.
    Axiom fairness;
};

/// drop-efx, drop-po, drop-nonbossy, drop-neutral, drop-sp.
std::vector<Fixture> minimality_fixtures();
/// mms-drop-po: one serial-dictatorship round; the last agent keeps the rest
/// when its pick was its n-th ranked good, otherwise the rest is discarded.
std::vector<Fixture> mms_minimality_fixtures();
std::optional<Fixture> find_fixture(const std::string& name);

} // namespace lexfair
