#include "cli.hpp"

#include "lexfair/lexfair.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lexfair::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_list(const std::string& text, const std::string& what)
{
    std::vector<int> out;
    if (text.empty()) {
        return out;
    }
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::logic_error&) {
            throw UsageError("bad " + what + " entry '" + item + "'");
        }
    }
    return out;
}

/// 1-based agent list on the command line, 0-based inside.
std::vector<AgentId> parse_agents(const std::string& text, const std::string& what)
{
    auto out = parse_list(text, what);
    for (int& a : out) {
        a -= 1;
    }
    return out;
}

Instance load_instance(const std::string& path)
{
    return parse_instance(read_file(path));
}

std::string yes_no(bool b)
{
    return b ? "true" : "false";
}

std::string describe(const Instance& inst, const Witness& w)
{
    if (w.envier == w.envied) {
        return "agent " + std::to_string(w.envier + 1) + " falls below its maximin share";
    }
    std::string s = "agent " + std::to_string(w.envier + 1) + " envies agent " + std::to_string(w.envied + 1);
    if (!w.removed.empty()) {
        s += " after removing";
        for (GoodId g : w.removed.goods()) {
            s += " " + inst.label(g);
        }
    }
    return s;
}

// ---- check ----------------------------------------------------------------------------

struct CheckArgs {
    std::string instance;
    std::string allocation;
    std::string require;
};

int cmd_check(const CheckArgs& a, std::ostream& out)
{
    const Instance inst = load_instance(a.instance);
    const Allocation alloc = parse_allocation(inst, read_file(a.allocation));
    const bool complete = alloc.is_complete(inst);

    std::map<std::string, std::optional<bool>> verdict;
    auto fairness = [&](const std::string& name, const FairnessVerdict& v) {
        verdict[name] = v.holds;
        out << name << ": " << yes_no(v.holds);
        if (v.witness) {
            out << "  (" << describe(inst, *v.witness) << ")";
        }
        out << '\n';
    };
    out << "complete: " << yes_no(complete) << '\n';
    fairness("EF", is_ef(inst, alloc));
    fairness("EFX", is_efx(inst, alloc));
    fairness("EF1", is_ef_k(inst, alloc, 1));
    if (complete) {
        fairness("MMS", is_mms(inst, alloc));
    } else {
        fairness("MMS", is_mms_definitional(inst, alloc));
    }
    verdict["PO"] = is_pareto_optimal(inst, alloc);
    out << "PO: " << yes_no(*verdict["PO"]) << '\n';
    if (complete) {
        verdict["RM"] = is_rank_maximal(inst, alloc);
        out << "RM: " << yes_no(*verdict["RM"]) << '\n';
    } else {
        verdict["RM"] = false;
        out << "RM: false  (partial allocation)\n";
    }

    bool ok = true;
    for (const auto& name : CLI::detail::split(a.require, ',')) {
        if (name.empty()) {
            continue;
        }
        std::string key = name;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
        if (key.rfind("EFK:", 0) == 0) {
            const int k = parse_list(key.substr(4), "k").at(0);
            const bool holds = is_ef_k(inst, alloc, k).holds;
            out << "EF" << k << ": " << yes_no(holds) << '\n';
            ok = ok && holds;
            continue;
        }
        const auto it = verdict.find(key);
        if (it == verdict.end()) {
            throw UsageError("unknown property '" + name + "' in --require");
        }
        ok = ok && it->second.value_or(false);
    }
    return ok ? kOk : kFails;
}

// ---- solve / mech -----------------------------------------------------------------------

struct SolveArgs {
    std::string instance;
    std::string mech = "alg2";
    std::string sigma;
    std::string tau = "last";
    std::string quotas;
};

int cmd_solve(const SolveArgs& a, std::ostream& out)
{
    const Instance inst = load_instance(a.instance);
    const std::vector<AgentId> sigma = a.sigma.empty() ? identity_order(inst.num_agents()) : parse_agents(a.sigma, "sigma");
    Allocation result;
    if (a.mech == "alg1") {
        const std::string& t = a.tau;
        TauPolicy tau;
        if (t == "last") {
            tau = TauPolicy::all_to();
        } else if (t == "rr") {
            tau = TauPolicy::round_robin();
        } else if (t.rfind("rr:", 0) == 0) {
            tau = TauPolicy::round_robin(parse_agents(t.substr(3), "tau"));
        } else if (t.rfind("all:", 0) == 0) {
            tau = TauPolicy::all_to(parse_agents(t.substr(4), "tau").at(0));
        } else if (t.rfind("explicit:", 0) == 0) {
            tau = TauPolicy::explicit_sequence(parse_agents(t.substr(9), "tau"));
        } else if (t == "explicit") {
            tau = TauPolicy::explicit_sequence({});
        } else {
            throw UsageError("unknown --tau '" + t + "'");
        }
        result = algorithm1(inst, sigma, tau);
    } else if (a.mech == "alg2") {
        result = algorithm2(inst, sigma);
    } else if (a.mech == "sdq") {
        result = sdq(inst, sigma, parse_list(a.quotas, "quota"));
    } else if (a.mech == "greedy-rm") {
        result = greedy_rank_maximal(inst, a.sigma.empty() ? std::vector<AgentId>{} : sigma);
    } else {
        throw UsageError("unknown mechanism '" + a.mech + "'");
    }
    out << serialize_allocation(inst, result);
    return kOk;
}

struct MechArgs {
    std::string instance;
    std::string seq;
};

int cmd_mech(const MechArgs& a, std::ostream& out)
{
    const Instance inst = load_instance(a.instance);
    out << serialize_allocation(inst, run_picking_sequence(inst, parse_agents(a.seq, "sequence")));
    return kOk;
}

// ---- exists / oracle ------------------------------------------------------------------------

struct ExistsArgs {
    std::string instance;
    std::string criterion = "ef";
    std::string method = "search";
    std::uint64_t budget = kDefaultNodeBudget;
};

int report_found(const Instance& inst, const std::optional<Allocation>& a, std::ostream& out)
{
    if (!a) {
        out << "none\n";
        return kFails;
    }
    out << "found\n" << serialize_allocation(inst, *a);
    return kOk;
}

int cmd_exists(const ExistsArgs& a, std::ostream& out)
{
    const Instance inst = load_instance(a.instance);
    const FairnessCriterion crit = FairnessCriterion::parse(a.criterion);
    if (a.method == "poly") {
        if (crit == FairnessCriterion::ef()) {
            return report_found(inst, exists_ef_rm(inst), out);
        }
        if (crit == FairnessCriterion::mms()) {
            return report_found(inst, exists_mms_rm(inst), out);
        }
        if (crit == FairnessCriterion::ef1() && inst.num_agents() == 3) {
            return report_found(inst, exists_ef1_rm_three(inst), out);
        }
        throw UsageError("no polynomial procedure for " + crit.name() + " with " + std::to_string(inst.num_agents())
                         + " agents; use --method search");
    }
    if (a.method == "search") {
        const SearchResult r = solve_fair_rm(inst, crit, a.budget);
        if (r.status == SearchStatus::Unknown) {
            out << "unknown\n";
            return kBudget;
        }
        return report_found(inst, r.allocation, out);
    }
    if (a.method == "brute") {
        return report_found(inst, brute_force(inst, crit, true, false, a.budget), out);
    }
    throw UsageError("unknown --method '" + a.method + "'");
}

struct OracleArgs {
    std::string instance;
    std::string criterion = "none";
    bool rm = false;
    bool po = false;
    std::uint64_t budget = kDefaultAllocationBudget;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out)
{
    const Instance inst = load_instance(a.instance);
    std::optional<FairnessCriterion> crit;
    if (a.criterion != "none") {
        crit = FairnessCriterion::parse(a.criterion);
    }
    return report_found(inst, brute_force(inst, crit, a.rm, a.po, a.budget), out);
}

// ---- axioms -------------------------------------------------------------------------------

struct AxiomsArgs {
    std::string mechanism = "alg2";
    int n = 0;
    int m = 0;
    std::string axiom = "all";
    std::string sigma;
    std::string quotas;
    int coalition = 2;
    std::uint64_t budget = kDefaultAuditBudget;
    std::uint64_t profile_budget = kDefaultProfileBudget;
    int threads = 1;
};

Axiom parse_axiom(const std::string& s)
{
    for (Axiom a : {Axiom::StrategyProof, Axiom::GroupStrategyProof, Axiom::NonBossy, Axiom::Neutral, Axiom::EFX,
                    Axiom::PO, Axiom::MMS}) {
        if (axiom_name(a) == s) {
            return a;
        }
    }
    throw UsageError("unknown axiom '" + s + "'");
}

void print_counterexample(const Counterexample& c, std::ostream& out)
{
    out << "# truthful profile\n" << serialize_instance(c.truthful);
    out << "# outcome\n" << serialize_allocation(c.truthful, c.before);
    if (c.reported == c.truthful) {
        return;
    }
    out << "# reported profile (deviators:";
    for (AgentId i : c.deviators) {
        out << ' ' << i + 1;
    }
    out << ")\n" << serialize_instance(c.reported);
    if (!c.relabeling.empty()) {
        out << "# relabeling:";
        for (GoodId g = 0; g < static_cast<GoodId>(c.relabeling.size()); ++g) {
            out << ' ' << c.truthful.label(g) << "->" << c.truthful.label(c.relabeling[g]);
        }
        out << '\n';
    }
    out << "# outcome\n" << serialize_allocation(c.reported, c.after);
}

int cmd_axioms(const AxiomsArgs& a, std::ostream& out)
{
    Mechanism mech;
    int n = a.n;
    int m = a.m;
    Axiom fairness = Axiom::EFX;
    if (auto fx = find_fixture(a.mechanism)) {
        mech = fx->mechanism;
        n = n ? n : fx->n;
        m = m ? m : fx->m;
        fairness = fx->fairness;
    } else {
        if (n < 1 || m < 1) {
            throw UsageError("--n and --m are required for mechanism '" + a.mechanism + "'");
        }
        const auto sigma = a.sigma.empty() ? identity_order(n) : parse_agents(a.sigma, "sigma");
        if (a.mechanism == "alg2") {
            mech = algorithm2_mechanism(sigma);
        } else if (a.mechanism == "sdq") {
            mech = sdq_mechanism(sigma, parse_list(a.quotas, "quota"));
        } else if (a.mechanism == "greedy-rm") {
            mech = greedy_rm_mechanism();
        } else {
            throw UsageError("unknown mechanism '" + a.mechanism + "'");
        }
    }
    std::vector<Axiom> axioms;
    if (a.axiom == "all") {
        axioms = {fairness, Axiom::PO, Axiom::StrategyProof, Axiom::NonBossy, Axiom::Neutral};
    } else {
        for (const auto& s : CLI::detail::split(a.axiom, ',')) {
            axioms.push_back(parse_axiom(s));
        }
    }
    AuditOptions opts;
    opts.work_budget = a.budget;
    opts.profile_budget = a.profile_budget;
    opts.threads = a.threads;
    const OutcomeTable table(mech, n, m, opts);
    out << "mechanism " << mech.name << " on n=" << n << ", m=" << m << " (" << table.size() << " profiles)\n";
    bool all_hold = true;
    for (Axiom ax : axioms) {
        const AxiomReport r = ax == Axiom::GroupStrategyProof ? check_group_strategyproof(table, a.coalition, opts)
                                                              : check_axiom(table, ax, opts);
        out << axiom_name(ax) << ": " << (r.holds ? "holds" : "violated") << '\n';
        if (r.counterexample) {
            print_counterexample(*r.counterexample, out);
        }
        all_hold = all_hold && r.holds;
    }
    return all_hold ? kOk : kFails;
}

// ---- reduce --------------------------------------------------------------------------------

struct ReduceArgs {
    std::string file;
    int k = 1;
    std::uint64_t seed = 0;
    int count = 5;
    int r = 3;
    std::uint64_t budget = kDefaultNodeBudget;
};

int cmd_reduce_verify(const ReduceArgs& a, std::ostream& out)
{
    std::mt19937_64 rng(a.seed);
    bool ok = true;
    for (int c = 0; c < a.count; ++c) {
        const SatInstance sat = random_223sat(a.r, rng);
        const SatReduction red = reduce_sat(sat);
        const bool satisfiable = sat_brute_force(sat).has_value();
        const SearchResult res = solve_fair_rm(red.instance, FairnessCriterion::efx(), a.budget);
        if (res.status == SearchStatus::Unknown) {
            out << "instance " << c + 1 << ": search budget exceeded\n";
            return kBudget;
        }
        bool agree = satisfiable == (res.status == SearchStatus::Found);
        if (res.allocation) {
            agree = agree && has_sat_structure(red, *res.allocation)
                    && satisfies(sat, decode_sat(red, *res.allocation));
        }
        int round_trips = 0;
        TruthAssignment t(sat.r);
        for (std::uint32_t mask = 0; mask < (1U << sat.r); ++mask) {
            for (int v = 0; v < sat.r; ++v) {
                t[v] = (mask >> v) & 1U;
            }
            if (satisfies(sat, t)) {
                agree = agree && decode_sat(red, encode_sat_assignment(red, t)) == t;
                ++round_trips;
            }
        }
        out << "instance " << c + 1 << ": " << (satisfiable ? "satisfiable" : "unsatisfiable") << ", EFX+RM "
            << (res.status == SearchStatus::Found ? "found" : "none") << ", " << round_trips << " round trips, "
            << (agree ? "ok" : "MISMATCH") << '\n';
        ok = ok && agree;
    }
    return ok ? kOk : kFails;
}

// ---- experiment ----------------------------------------------------------------------------

struct ExperimentArgs {
    int n = 5;
    int m_min = 5;
    int m_max = 10;
    int m_step = 1;
    std::string phi = "0,0.25,0.5,0.75,1";
    int trials = 100;
    std::string criteria = "ef,efx,ef1,mms";
    std::uint64_t seed = 0;
    std::string out_path;
    std::uint64_t budget = kDefaultNodeBudget;
    int jobs = 1;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out)
{
    if (a.m_step < 1 || a.m_min < 1 || a.m_max < a.m_min) {
        throw UsageError("need 1 <= m-min <= m-max and m-step >= 1");
    }
    SweepConfig cfg;
    cfg.n = a.n;
    for (int m = a.m_min; m <= a.m_max; m += a.m_step) {
        cfg.ms.push_back(m);
    }
    for (const auto& p : CLI::detail::split(a.phi, ',')) {
        try {
            cfg.phis.push_back(std::stod(p));
        } catch (const std::logic_error&) {
            throw UsageError("bad --phi entry '" + p + "'");
        }
    }
    cfg.criteria = CLI::detail::split(a.criteria, ',');
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.node_budget = a.budget;
    cfg.jobs = a.jobs;
    const auto records = run_sweep(cfg);
    if (a.out_path.empty()) {
        out << sweep_csv(records);
    } else {
        write_csv(records, a.out_path);
    }
    return kOk;
}

struct PlotArgs {
    std::string csv;
    std::string out_dir = ".";
};

int cmd_plotdata(const PlotArgs& a, std::ostream& out)
{
    const auto series = plot_series(parse_sweep_csv(read_file(a.csv)));
    std::filesystem::create_directories(a.out_dir);
    for (const auto& [phi, table] : series) {
        char name[64];
        std::snprintf(name, sizeof name, "phi_%g.csv", phi);
        const auto path = std::filesystem::path(a.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!(f << table)) {
            throw Error("cannot write " + path.string());
        }
        out << path.string() << '\n';
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fair division of indivisible goods under lexicographic preferences"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    int code = kOk;
    std::function<int()> action;

    CheckArgs check;
    auto* c = app.add_subcommand("check", "Run every fairness and efficiency checker on an allocation");
    c->add_option("instance", check.instance, "Instance file")->required();
    c->add_option("allocation", check.allocation, "Allocation file")->required();
    c->add_option("--require", check.require, "Comma-separated properties that must hold (ef,efx,ef1,efk:<k>,mms,po,rm)");
    c->callback([&] { action = [&] { return cmd_check(check, out); }; });

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Run a mechanism on an instance");
    s->add_option("instance", solve.instance, "Instance file")->required();
    s->add_option("--mech", solve.mech, "alg1, alg2, sdq or greedy-rm")->capture_default_str();
    s->add_option("--sigma", solve.sigma, "Agent order, 1-based, comma-separated");
    s->add_option("--tau", solve.tau, "alg1 leftover policy: last, rr, rr:<list>, all:<agent> or explicit:<list>")
        ->capture_default_str();
    s->add_option("--quotas", solve.quotas, "sdq quotas by sigma position");
    s->callback([&] { action = [&] { return cmd_solve(solve, out); }; });

    MechArgs mech;
    auto* mc = app.add_subcommand("mech", "Replay a picking sequence");
    mc->add_option("instance", mech.instance, "Instance file")->required();
    mc->add_option("--seq", mech.seq, "Picking sequence, 1-based agents")->required();
    mc->callback([&] { action = [&] { return cmd_mech(mech, out); }; });

    ExistsArgs exists;
    auto* e = app.add_subcommand("exists", "Decide whether a fair and rank-maximal allocation exists");
    e->add_option("instance", exists.instance, "Instance file")->required();
    e->add_option("--criterion", exists.criterion, "ef, efx, ef1, efk:<k> or mms")->capture_default_str();
    e->add_option("--method", exists.method, "poly, search or brute")->capture_default_str();
    e->add_option("--budget", exists.budget, "Search nodes (search) or allocations (brute)")->capture_default_str();
    e->callback([&] { action = [&] { return cmd_exists(exists, out); }; });

    OracleArgs oracle;
    auto* o = app.add_subcommand("oracle", "Brute force over every complete allocation");
    o->add_option("instance", oracle.instance, "Instance file")->required();
    o->add_option("--criterion", oracle.criterion, "ef, efx, ef1, efk:<k>, mms or none")->capture_default_str();
    o->add_flag("--rm", oracle.rm, "Require rank-maximality");
    o->add_flag("--po", oracle.po, "Require Pareto optimality");
    o->add_option("--budget", oracle.budget, "Maximum number of allocations")->capture_default_str();
    o->callback([&] { action = [&] { return cmd_oracle(oracle, out); }; });

    AxiomsArgs axioms;
    auto* ax = app.add_subcommand("axioms", "Audit a mechanism over every profile of a small domain");
    ax->add_option("--mechanism", axioms.mechanism,
                   "alg2, sdq, greedy-rm, or a fixture (drop-efx, drop-po, drop-nonbossy, drop-neutral, drop-sp, mms-drop-po)")
        ->capture_default_str();
    ax->add_option("--n", axioms.n, "Agents (fixtures default to their own domain)");
    ax->add_option("--m", axioms.m, "Goods (fixtures default to their own domain)");
    ax->add_option("--axiom", axioms.axiom, "sp, gsp, nonbossy, neutral, efx, po, mms, a comma list, or all")
        ->capture_default_str();
    ax->add_option("--sigma", axioms.sigma, "Agent order for alg2/sdq, 1-based");
    ax->add_option("--quotas", axioms.quotas, "sdq quotas by sigma position");
    ax->add_option("--coalition", axioms.coalition, "Largest coalition for gsp")->capture_default_str();
    ax->add_option("--budget", axioms.budget, "Work cap in outcome comparisons")->capture_default_str();
    ax->add_option("--profile-budget", axioms.profile_budget, "Largest profile domain")->capture_default_str();
    ax->add_option("--threads", axioms.threads, "Worker threads")->capture_default_str();
    ax->callback([&] { action = [&] { return cmd_axioms(axioms, out); }; });

    ReduceArgs reduce;
    auto* rd = app.add_subcommand("reduce", "Hardness reductions");
    rd->require_subcommand(1);
    auto* rsat = rd->add_subcommand("sat", "Reduce a (2/2/3)-SAT formula to an EFX+RM instance");
    rsat->add_option("file", reduce.file, "DIMACS-like formula")->required();
    rsat->callback([&] {
        action = [&] {
            out << serialize_instance(reduce_sat(parse_dimacs(read_file(reduce.file))).instance);
            return kOk;
        };
    });
    auto* rpit = rd->add_subcommand("pit", "Reduce a tripartite graph to an EFk+RM instance");
    rpit->add_option("file", reduce.file, "Graph file")->required();
    rpit->add_option("--k", reduce.k, "k of EFk")->capture_default_str();
    rpit->callback([&] {
        action = [&] {
            out << serialize_instance(reduce_pit(parse_graph(read_file(reduce.file)), reduce.k).instance);
            return kOk;
        };
    });
    auto* rver = rd->add_subcommand("verify", "Check the SAT reduction on random formulas");
    rver->add_option("--seed", reduce.seed, "Generator seed")->capture_default_str();
    rver->add_option("--count", reduce.count, "Number of formulas")->capture_default_str();
    rver->add_option("--r", reduce.r, "Variables per formula (multiple of 3)")->capture_default_str();
    rver->add_option("--budget", reduce.budget, "Search node budget")->capture_default_str();
    rver->callback([&] { action = [&] { return cmd_reduce_verify(reduce, out); }; });

    ExperimentArgs exp;
    auto* x = app.add_subcommand("experiment", "Mallows sweep of existence fractions");
    x->add_option("--n", exp.n, "Agents")->capture_default_str();
    x->add_option("--m-min", exp.m_min, "Smallest number of goods")->capture_default_str();
    x->add_option("--m-max", exp.m_max, "Largest number of goods")->capture_default_str();
    x->add_option("--m-step", exp.m_step, "Step in the number of goods")->capture_default_str();
    x->add_option("--phi", exp.phi, "Comma-separated dispersion values")->capture_default_str();
    x->add_option("--trials", exp.trials, "Profiles per grid point")->capture_default_str();
    x->add_option("--criteria", exp.criteria, "ef, efx, ef1, efk:<k>, mms, good")->capture_default_str();
    x->add_option("--seed", exp.seed, "Base seed")->capture_default_str();
    x->add_option("--out", exp.out_path, "CSV output path (stdout when omitted)");
    x->add_option("--budget", exp.budget, "Search node budget per decision")->capture_default_str();
    x->add_option("--jobs", exp.jobs, "Worker threads")->capture_default_str();
    x->callback([&] {
        if (!action) {
            action = [&] { return cmd_experiment(exp, out); };
        }
    });
    PlotArgs plot;
    auto* xp = x->add_subcommand("plotdata", "Split a sweep CSV into one series file per phi");
    xp->add_option("csv", plot.csv, "Sweep CSV")->required();
    xp->add_option("--out-dir", plot.out_dir, "Directory for the series files")->capture_default_str();
    xp->callback([&] { action = [&] { return cmd_plotdata(plot, out); }; });

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& pe) {
        const int rc = app.exit(pe, out, err);
        return rc == 0 ? kOk : kUsage;
    }
    try {
        code = action ? action() : kUsage;
    } catch (const UsageError& ue) {
        err << "error: " << ue.what() << '\n';
        return kUsage;
    } catch (const BudgetExceeded& be) {
        err << "budget exceeded: " << be.what() << '\n';
        return kBudget;
    } catch (const ParseError& pe) {
        err << "error: " << pe.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& ia) {
        err << "error: " << ia.what() << '\n';
        return kUsage;
    } catch (const InternalError& ie) {
        err << "internal error: " << ie.what() << '\n';
        return kFails;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kUsage;
    }
    return code;
}

} // namespace lexfair::cli
