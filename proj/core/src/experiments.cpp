#include "lexfair/experiments.hpp"

#include "lexfair/existence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace lexfair {

int kendall_tau(const Ranking& a, const Ranking& b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("rankings range over different numbers of goods");
    }
    int out = 0;
    for (GoodId g = 0; g < a.size(); ++g) {
        for (GoodId h = g + 1; h < a.size(); ++h) {
            out += a.prefers(g, h) != b.prefers(g, h) ? 1 : 0;
        }
    }
    return out;
}

double unit_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

void check_phi(double phi)
{
    if (!(phi >= 0.0 && phi <= 1.0)) {
        throw std::invalid_argument("phi must lie in [0, 1]");
    }
}

} // namespace

Ranking mallows_sample(const MallowsParams& params, std::mt19937_64& rng)
{
    check_phi(params.phi);
    const int m = params.reference.size();
    std::vector<GoodId> order;
    order.reserve(m);
    std::vector<double> weight;
    for (int j = 1; j <= m; ++j) {
        // weight[i-1] = phi^(j-i) for insertion position i = 1..j, with 0^0 = 1
        weight.assign(j, 0.0);
        double total = 0;
        for (int i = 1; i <= j; ++i) {
            weight[i - 1] = j == i ? 1.0 : std::pow(params.phi, j - i);
            total += weight[i - 1];
        }
        double u = unit_uniform(rng) * total;
        int pos = j;
        for (int i = 1; i <= j; ++i) {
            if (u < weight[i - 1]) {
                pos = i;
                break;
            }
            u -= weight[i - 1];
        }
        order.insert(order.begin() + (pos - 1), params.reference.at(j - 1));
    }
    return Ranking(std::move(order));
}

double mallows_pmf(const MallowsParams& params, const Ranking& r)
{
    check_phi(params.phi);
    const int m = params.reference.size();
    if (m > 8) {
        throw BudgetExceeded("the Mallows normalizer is enumerated only up to 8 goods");
    }
    if (r.size() != m) {
        throw std::invalid_argument("ranking and reference range over different goods");
    }
    auto weight = [&](int d) { return d == 0 ? 1.0 : std::pow(params.phi, d); };
    const RankingDomain dom(m);
    double z = 0;
    for (std::uint64_t i = 0; i < dom.size(); ++i) {
        z += weight(kendall_tau(params.reference, dom.at(i)));
    }
    return weight(kendall_tau(params.reference, r)) / z;
}

double ef_rm_closed_form(int n, int m)
{
    if (m < n) {
        return 0.0;
    }
    double p = 1.0;
    for (int i = 1; i < n; ++i) {
        p *= 1.0 - static_cast<double>(i) / m;
    }
    return p;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t trial_seed(std::uint64_t seed, double phi, int m, int trial)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(phi));
    h = splitmix64(h ^ static_cast<std::uint64_t>(m));
    return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

Instance sample_profile(int n, int m, double phi, std::mt19937_64& rng)
{
    const MallowsParams params{Ranking::identity(m), phi};
    std::vector<Ranking> profile;
    for (int i = 0; i < n; ++i) {
        profile.push_back(mallows_sample(params, rng));
    }
    return Instance(std::move(profile));
}

Verdict decide(const Instance& inst, const std::string& criterion, std::uint64_t node_budget, bool search_only)
{
    auto verdict = [](bool found) { return found ? Verdict::Exists : Verdict::None; };
    if (criterion == "good") {
        return verdict(exists_rm_with_small_bundle(inst).has_value());
    }
    const FairnessCriterion crit = FairnessCriterion::parse(criterion);
    if (!search_only) {
        if (crit == FairnessCriterion::ef()) {
            return verdict(exists_ef_rm(inst).has_value());
        }
        if (crit == FairnessCriterion::mms()) {
            return verdict(exists_mms_rm(inst).has_value());
        }
        if (crit == FairnessCriterion::ef1() && inst.num_agents() == 3) {
            return verdict(exists_ef1_rm_three(inst).has_value());
        }
    }
    switch (solve_fair_rm(inst, crit, node_budget).status) {
    case SearchStatus::Found:
        return Verdict::Exists;
    case SearchStatus::None:
        return Verdict::None;
    case SearchStatus::Unknown:
        break;
    }
    return Verdict::Unknown;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config)
{
    if (config.trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }
    for (double phi : config.phis) {
        check_phi(phi);
    }
    for (const auto& c : config.criteria) {
        if (c != "good") {
            FairnessCriterion::parse(c);
        }
    }
    struct Point {
        double phi;
        int m;
    };
    std::vector<Point> points;
    for (double phi : config.phis) {
        for (int m : config.ms) {
            points.push_back({phi, m});
        }
    }
    const std::size_t nc = config.criteria.size();
    const std::size_t per_point = static_cast<std::size_t>(config.trials);
    std::vector<Verdict> verdicts(points.size() * per_point * nc);

    const std::size_t jobs = points.size() * per_point;
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t job = begin; job < end; ++job) {
            const Point& pt = points[job / per_point];
            const int trial = static_cast<int>(job % per_point);
            std::mt19937_64 rng(trial_seed(config.seed, pt.phi, pt.m, trial));
            const Instance inst = sample_profile(config.n, pt.m, pt.phi, rng);
            for (std::size_t c = 0; c < nc; ++c) {
                verdicts[job * nc + c] = decide(inst, config.criteria[c], config.node_budget, config.search_only);
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(config.jobs, 1, std::max<std::size_t>(jobs, 1));
    if (workers == 1) {
        work(0, jobs);
    } else {
        // Interleaved striping keeps expensive grid points spread across workers.
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t job = w; job < jobs; job += workers) {
                        work(job, job + 1);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    std::vector<SweepRecord> out;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t c = 0; c < nc; ++c) {
            SweepRecord rec;
            rec.phi = points[p].phi;
            rec.m = points[p].m;
            rec.n = config.n;
            rec.criterion = config.criteria[c];
            rec.trials = config.trials;
            rec.seed = config.seed;
            for (std::size_t t = 0; t < per_point; ++t) {
                const Verdict v = verdicts[(p * per_point + t) * nc + c];
                rec.exists_count += v == Verdict::Exists ? 1 : 0;
                rec.unknown_count += v == Verdict::Unknown ? 1 : 0;
            }
            const int decided = rec.trials - rec.unknown_count;
            rec.fraction = decided > 0 ? static_cast<double>(rec.exists_count) / decided : 0.0;
            out.push_back(rec);
        }
    }
    return out;
}

namespace {

std::string format_double(const char* fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

} // namespace

std::string sweep_csv(const std::vector<SweepRecord>& records)
{
    std::ostringstream out;
    out << "phi,m,n,criterion,trials,exists_count,unknown_count,fraction,seed\n";
    for (const auto& r : records) {
        out << format_double("%g", r.phi) << ',' << r.m << ',' << r.n << ',' << r.criterion << ',' << r.trials << ','
            << r.exists_count << ',' << r.unknown_count << ',' << format_double("%.6f", r.fraction) << ',' << r.seed
            << '\n';
    }
    return out.str();
}

void write_csv(const std::vector<SweepRecord>& records, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << sweep_csv(records);
    if (!out) {
        throw Error("failed writing " + path);
    }
}

std::vector<SweepRecord> parse_sweep_csv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "phi,m,n,criterion,trials,exists_count,unknown_count,fraction,seed") {
        throw ParseError("not a sweep CSV (unexpected header)");
    }
    std::vector<SweepRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cell;
        std::istringstream row(line);
        for (std::string c; std::getline(row, c, ',');) {
            cell.push_back(c);
        }
        if (cell.size() != 9) {
            throw ParseError("sweep CSV row has " + std::to_string(cell.size()) + " cells, expected 9");
        }
        try {
            SweepRecord r;
            r.phi = std::stod(cell[0]);
            r.m = std::stoi(cell[1]);
            r.n = std::stoi(cell[2]);
            r.criterion = cell[3];
            r.trials = std::stoi(cell[4]);
            r.exists_count = std::stoi(cell[5]);
            r.unknown_count = std::stoi(cell[6]);
            r.fraction = std::stod(cell[7]);
            r.seed = std::stoull(cell[8]);
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw ParseError("malformed number in sweep CSV row '" + line + "'");
        }
    }
    return out;
}

std::map<double, std::string> plot_series(const std::vector<SweepRecord>& records)
{
    std::map<double, std::vector<const SweepRecord*>> by_phi;
    for (const auto& r : records) {
        by_phi[r.phi].push_back(&r);
    }
    std::map<double, std::string> out;
    for (const auto& [phi, rows] : by_phi) {
        std::vector<std::string> criteria;
        std::set<int> ms;
        std::map<std::pair<int, std::string>, double> value;
        for (const SweepRecord* r : rows) {
            if (std::find(criteria.begin(), criteria.end(), r->criterion) == criteria.end()) {
                criteria.push_back(r->criterion);
            }
            ms.insert(r->m);
            value[{r->m, r->criterion}] = r->fraction;
        }
        std::ostringstream table;
        table << 'm';
        for (const auto& c : criteria) {
            table << ',' << c;
        }
        table << '\n';
        for (int m : ms) {
            table << m;
            for (const auto& c : criteria) {
                const auto it = value.find({m, c});
                table << ',' << (it == value.end() ? std::string() : format_double("%.6f", it->second));
            }
            table << '\n';
        }
        out[phi] = table.str();
    }
    return out;
}

} // namespace lexfair
