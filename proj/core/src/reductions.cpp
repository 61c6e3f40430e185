#include "lexfair/reductions.hpp"

#include "lexfair/efficiency.hpp"
#include "lexfair/fairness.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace lexfair {

namespace {

/// Builds one preference row. fill(l) appends the first l goods of the
/// reference order (good ids ascending) that are not ranked yet.
class RowBuilder {
public:
    explicit RowBuilder(int m) : ranked_(m, false) {}

    void put(GoodId g)
    {
        if (ranked_[g]) {
            throw InternalError("good ranked twice while building a reduction row");
        }
        ranked_[g] = true;
        order_.push_back(g);
    }

    void fill(int count)
    {
        for (; count > 0; --count) {
            while (cursor_ < static_cast<int>(ranked_.size()) && ranked_[cursor_]) {
                ++cursor_;
            }
            if (cursor_ == static_cast<int>(ranked_.size())) {
                throw InternalError("reference order exhausted while building a reduction row");
            }
            put(cursor_);
        }
    }

    Ranking finish()
    {
        fill(static_cast<int>(ranked_.size() - order_.size()));
        return Ranking(std::move(order_));
    }

private:
    std::vector<bool> ranked_;
    std::vector<GoodId> order_;
    int cursor_ = 0;
};

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound)
{
    const std::uint64_t limit = rng.max() - rng.max() % bound;
    std::uint64_t v = 0;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

std::vector<std::string> split_ws(std::string_view line)
{
    std::istringstream in{std::string(line)};
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) {
        out.push_back(tok);
    }
    return out;
}

int parse_int(const std::string& tok, const std::string& what)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used == tok.size()) {
            return v;
        }
    } catch (const std::logic_error&) {
    }
    throw ParseError("expected an integer for " + what + ", got '" + tok + "'");
}

std::vector<std::string_view> lines_of(std::string_view text)
{
    std::vector<std::string_view> out;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        out.push_back(text.substr(0, nl));
        if (nl == std::string_view::npos) {
            break;
        }
        text.remove_prefix(nl + 1);
    }
    return out;
}

} // namespace

// ---- SAT ----------------------------------------------------------------------------

std::string sat_223_problem(const SatInstance& sat)
{
    if (sat.r < 1) {
        return "at least one variable is required";
    }
    std::vector<int> pos(sat.r, 0);
    std::vector<int> neg(sat.r, 0);
    for (std::size_t j = 0; j < sat.clauses.size(); ++j) {
        const auto& c = sat.clauses[j];
        for (int a = 0; a < 3; ++a) {
            if (c[a].var < 0 || c[a].var >= sat.r) {
                return "clause " + std::to_string(j + 1) + " references an unknown variable";
            }
            for (int b = 0; b < a; ++b) {
                if (c[a].var == c[b].var) {
                    return "clause " + std::to_string(j + 1) + " mentions variable "
                           + std::to_string(c[a].var + 1) + " twice";
                }
            }
            ++(c[a].negated ? neg : pos)[c[a].var];
        }
    }
    if (3 * sat.clauses.size() != 4 * static_cast<std::size_t>(sat.r)) {
        return "3s must equal 4r";
    }
    for (int v = 0; v < sat.r; ++v) {
        if (pos[v] != 2 || neg[v] != 2) {
            return "variable " + std::to_string(v + 1) + " must occur twice positively and twice negatively";
        }
    }
    return {};
}

bool satisfies(const SatInstance& sat, const TruthAssignment& a)
{
    if (static_cast<int>(a.size()) != sat.r) {
        throw std::invalid_argument("assignment has the wrong number of variables");
    }
    return std::all_of(sat.clauses.begin(), sat.clauses.end(), [&](const auto& c) {
        return std::any_of(c.begin(), c.end(), [&](const Literal& l) { return a[l.var] != l.negated; });
    });
}

std::optional<TruthAssignment> sat_brute_force(const SatInstance& sat)
{
    if (sat.r > 20) {
        throw BudgetExceeded("SAT enumeration is limited to 20 variables");
    }
    TruthAssignment a(sat.r);
    for (std::uint32_t mask = 0; mask < (1U << sat.r); ++mask) {
        for (int v = 0; v < sat.r; ++v) {
            a[v] = (mask >> v) & 1U;
        }
        if (satisfies(sat, a)) {
            return a;
        }
    }
    return std::nullopt;
}

SatInstance parse_dimacs(std::string_view text)
{
    SatInstance sat;
    int declared = -1;
    for (std::string_view line : lines_of(text)) {
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0] == "c" || tok[0][0] == '#') {
            continue;
        }
        if (tok[0] == "p") {
            if (declared >= 0 || tok.size() != 4 || tok[1] != "cnf") {
                throw ParseError("malformed header, expected 'p cnf <vars> <clauses>'");
            }
            sat.r = parse_int(tok[2], "variable count");
            declared = parse_int(tok[3], "clause count");
            continue;
        }
        if (declared < 0) {
            throw ParseError("clause before the 'p cnf' header");
        }
        if (tok.size() != 4 || tok[3] != "0") {
            throw ParseError("each clause needs exactly three literals followed by 0");
        }
        std::array<Literal, 3> clause;
        for (int a = 0; a < 3; ++a) {
            const int lit = parse_int(tok[a], "literal");
            if (lit == 0 || std::abs(lit) > sat.r) {
                throw ParseError("literal " + tok[a] + " is out of range");
            }
            clause[a] = {std::abs(lit) - 1, lit < 0};
        }
        sat.clauses.push_back(clause);
    }
    if (declared < 0) {
        throw ParseError("missing 'p cnf' header");
    }
    if (static_cast<int>(sat.clauses.size()) != declared) {
        throw ParseError("header declares " + std::to_string(declared) + " clauses, found "
                         + std::to_string(sat.clauses.size()));
    }
    return sat;
}

std::string serialize_dimacs(const SatInstance& sat)
{
    std::ostringstream out;
    out << "p cnf " << sat.r << ' ' << sat.clauses.size() << '\n';
    for (const auto& c : sat.clauses) {
        for (const Literal& l : c) {
            out << (l.negated ? -(l.var + 1) : l.var + 1) << ' ';
        }
        out << "0\n";
    }
    return out.str();
}

SatInstance random_223sat(int r, std::mt19937_64& rng)
{
    if (r < 3 || r % 3 != 0) {
        throw std::invalid_argument("(2/2/3)-SAT needs a positive multiple of 3 variables");
    }
    std::vector<Literal> slots;
    for (int v = 0; v < r; ++v) {
        slots.insert(slots.end(), {{v, false}, {v, false}, {v, true}, {v, true}});
    }
    SatInstance sat;
    sat.r = r;
    for (;;) {
        for (std::size_t i = slots.size() - 1; i > 0; --i) {
            std::swap(slots[i], slots[uniform_below(rng, i + 1)]);
        }
        sat.clauses.clear();
        for (std::size_t j = 0; j < slots.size(); j += 3) {
            sat.clauses.push_back({slots[j], slots[j + 1], slots[j + 2]});
        }
        if (validate_223sat(sat)) {
            return sat;
        }
    }
}

SatReduction reduce_sat(const SatInstance& sat)
{
    if (const auto why = sat_223_problem(sat); !why.empty()) {
        throw std::invalid_argument("not a (2/2/3)-SAT instance: " + why);
    }
    SatReduction red;
    red.sat = sat;
    const int r = red.r();
    const int s = red.s();
    const int m = 4 * r + s;

    std::vector<std::string> labels(m);
    for (int i = 0; i < r; ++i) {
        labels[red.S(i)] = "S:" + std::to_string(i + 1);
        labels[red.Sbar(i)] = "Sbar:" + std::to_string(i + 1);
        labels[red.T(i)] = "T:" + std::to_string(i + 1);
        labels[red.B(i)] = "B:" + std::to_string(i + 1);
    }
    for (int j = 0; j < s; ++j) {
        labels[red.C(j)] = "C:" + std::to_string(j + 1);
    }

    // The two clauses holding each literal, in clause order.
    std::vector<std::vector<int>> occurs(2 * r);
    for (int j = 0; j < s; ++j) {
        for (const Literal& l : sat.clauses[j]) {
            occurs[red.literal_agent(l)].push_back(j);
        }
    }

    std::vector<Ranking> profile(4 * r);
    for (int i = 0; i < r; ++i) {
        for (bool negated : {false, true}) {
            const AgentId agent = negated ? red.xbar(i) : red.x(i);
            const int j = occurs[agent][0];
            const int k = occurs[agent][1];
            RowBuilder row(m);
            row.put(negated ? red.Sbar(i) : red.S(i));
            row.fill(j);
            row.put(red.C(j));
            row.fill(k - j - 1);
            row.put(red.C(k));
            profile[agent] = row.finish();
        }
        for (bool negated : {false, true}) {
            RowBuilder row(m);
            row.put(red.T(i));
            row.put(negated ? red.Sbar(i) : red.S(i));
            row.put(red.B(i));
            profile[negated ? red.dbar(i) : red.d(i)] = row.finish();
        }
    }
    red.instance = Instance(std::move(labels), std::move(profile));
    return red;
}

Allocation encode_sat_assignment(const SatReduction& red, const TruthAssignment& a)
{
    if (static_cast<int>(a.size()) != red.r()) {
        throw std::invalid_argument("assignment has the wrong number of variables");
    }
    Allocation out(red.instance.num_agents());
    for (int i = 0; i < red.r(); ++i) {
        out.assign(red.S(i), red.x(i));
        out.assign(red.Sbar(i), red.xbar(i));
        out.assign(red.T(i), a[i] ? red.d(i) : red.dbar(i));
        out.assign(red.B(i), a[i] ? red.dbar(i) : red.d(i));
    }
    for (int j = 0; j < red.s(); ++j) {
        const auto& clause = red.sat.clauses[j];
        const auto hit = std::find_if(clause.begin(), clause.end(),
                                      [&](const Literal& l) { return a[l.var] != l.negated; });
        if (hit == clause.end()) {
            throw std::invalid_argument("assignment leaves clause " + std::to_string(j + 1) + " unsatisfied");
        }
        out.assign(red.C(j), red.literal_agent(*hit));
    }
    return out;
}

TruthAssignment decode_sat(const SatReduction& red, const Allocation& a)
{
    validate_allocation(red.instance, a);
    if (!a.is_complete(red.instance) || !is_rank_maximal(red.instance, a)) {
        throw std::invalid_argument("allocation is not rank-maximal on the reduced instance");
    }
    if (!is_efx(red.instance, a)) {
        throw std::invalid_argument("allocation is not EFX on the reduced instance");
    }
    TruthAssignment out(red.r());
    for (int i = 0; i < red.r(); ++i) {
        out[i] = a.bundle(red.d(i)).contains(red.T(i));
    }
    if (!satisfies(red.sat, out)) {
        throw InternalError("decoded assignment does not satisfy the formula");
    }
    return out;
}

bool has_sat_structure(const SatReduction& red, const Allocation& a)
{
    for (int i = 0; i < red.r(); ++i) {
        if (a.owner(red.S(i)) != red.x(i) || a.owner(red.Sbar(i)) != red.xbar(i)) {
            return false;
        }
        for (AgentId dummy : {red.d(i), red.dbar(i)}) {
            const Bundle mine = a.bundle(dummy);
            const Bundle dummy_goods{red.T(i), red.B(i)};
            if (mine.size() != 1 || !mine.subset_of(dummy_goods)) {
                return false;
            }
        }
    }
    for (int j = 0; j < red.s(); ++j) {
        const auto owner = a.owner(red.C(j));
        const auto& clause = red.sat.clauses[j];
        if (!owner || std::none_of(clause.begin(), clause.end(),
                                   [&](const Literal& l) { return red.literal_agent(l) == *owner; })) {
            return false;
        }
    }
    return true;
}

// ---- PIT ----------------------------------------------------------------------------

bool TripartiteGraph::adjacent(int u, int v) const
{
    const auto e = std::minmax(u, v);
    return std::find(edges.begin(), edges.end(), std::pair<int, int>(e.first, e.second)) != edges.end();
}

std::vector<std::pair<int, int>> TripartiteGraph::non_edges() const
{
    std::set<std::pair<int, int>> present(edges.begin(), edges.end());
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < num_vertices(); ++u) {
        for (int v = u + 1; v < num_vertices(); ++v) {
            if (!present.contains({u, v})) {
                out.emplace_back(u, v);
            }
        }
    }
    return out;
}

std::string TripartiteGraph::vertex_name(int v) const
{
    static constexpr char names[] = {'w', 'x', 'y'};
    return names[part(v)] + std::to_string(v % q + 1);
}

void validate_graph(const TripartiteGraph& g)
{
    if (g.q < 1) {
        throw std::invalid_argument("part size must be at least 1");
    }
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : g.edges) {
        if (u < 0 || v < 0 || u >= g.num_vertices() || v >= g.num_vertices()) {
            throw std::invalid_argument("edge endpoint out of range");
        }
        if (u >= v) {
            throw std::invalid_argument("edges must list the smaller vertex first");
        }
        if (g.part(u) == g.part(v)) {
            throw std::invalid_argument("edge " + g.vertex_name(u) + "-" + g.vertex_name(v) + " lies inside one part");
        }
        if (!seen.insert({u, v}).second) {
            throw std::invalid_argument("duplicate edge " + g.vertex_name(u) + "-" + g.vertex_name(v));
        }
    }
}

TripartiteGraph complete_tripartite(int q)
{
    TripartiteGraph g;
    g.q = q;
    for (int u = 0; u < 3 * q; ++u) {
        for (int v = u + 1; v < 3 * q; ++v) {
            if (g.part(u) != g.part(v)) {
                g.edges.emplace_back(u, v);
            }
        }
    }
    return g;
}

namespace {

int parse_vertex(const std::string& name, int q)
{
    static constexpr std::string_view parts = "wxy";
    const auto p = name.empty() ? std::string_view::npos : parts.find(name[0]);
    if (p == std::string_view::npos) {
        throw ParseError("unknown vertex '" + name + "'");
    }
    const int index = parse_int(name.substr(1), "vertex index");
    if (index < 1 || index > q) {
        throw ParseError("vertex '" + name + "' is out of range");
    }
    return static_cast<int>(p) * q + index - 1;
}

} // namespace

TripartiteGraph parse_graph(std::string_view text)
{
    TripartiteGraph g;
    for (std::string_view line : lines_of(text)) {
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0][0] == '#') {
            continue;
        }
        if (tok[0] == "parts") {
            if (g.q != 0 || tok.size() != 2) {
                throw ParseError("malformed 'parts' line");
            }
            g.q = parse_int(tok[1], "part size");
            if (g.q < 1) {
                throw ParseError("part size must be at least 1");
            }
        } else if (tok[0] == "edge") {
            if (g.q == 0) {
                throw ParseError("'edge' before 'parts'");
            }
            if (tok.size() != 3) {
                throw ParseError("an edge line names exactly two vertices");
            }
            const int u = parse_vertex(tok[1], g.q);
            const int v = parse_vertex(tok[2], g.q);
            g.edges.emplace_back(std::min(u, v), std::max(u, v));
        } else {
            throw ParseError("unexpected line '" + std::string(line) + "'");
        }
    }
    if (g.q == 0) {
        throw ParseError("missing 'parts' line");
    }
    try {
        validate_graph(g);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return g;
}

std::string serialize_graph(const TripartiteGraph& g)
{
    std::ostringstream out;
    out << "parts " << g.q << '\n';
    for (auto [u, v] : g.edges) {
        out << "edge " << g.vertex_name(u) << ' ' << g.vertex_name(v) << '\n';
    }
    return out.str();
}

PitReduction reduce_pit(const TripartiteGraph& g, int k)
{
    validate_graph(g);
    if (k < 1) {
        throw std::invalid_argument("k must be at least 1");
    }
    PitReduction red;
    red.graph = g;
    red.k = k;
    red.non_edges = g.non_edges();
    const int q = g.q;
    const int t = red.t();
    const int group = red.group_size();
    const int n = q + t * group;
    const int m = 3 * q + (k - 1) * q + t * group;

    std::vector<std::string> labels(m);
    for (int i = 0; i < q; ++i) {
        for (int r = 0; r < k - 1; ++r) {
            labels[red.selector(i, r)] = "S:" + std::to_string(i + 1) + ":" + std::to_string(r + 1);
        }
    }
    for (int v = 0; v < 3 * q; ++v) {
        std::string name = g.vertex_name(v);
        name[0] = static_cast<char>(std::toupper(name[0]));
        labels[red.main_good(v)] = name.substr(0, 1) + ":" + name.substr(1);
    }
    for (int l = 0; l < t; ++l) {
        for (int r = 0; r < group; ++r) {
            labels[red.dummy_good(l, r)] = "D:" + std::to_string(l + 1) + ":" + std::to_string(r + 1);
        }
    }

    std::vector<Ranking> profile(n);
    for (int i = 0; i < q; ++i) {
        RowBuilder row(m);
        for (int step = 0; step < q; ++step) {
            for (int r = 0; r < k - 1; ++r) {
                row.put(red.selector((i + step) % q, r));
            }
        }
        for (int v = 0; v < 3 * q; ++v) {
            row.put(red.main_good(v));
        }
        profile[red.main_agent(i)] = row.finish();
    }
    for (int l = 0; l < t; ++l) {
        const auto [u, v] = red.non_edges[l];
        RowBuilder row(m);
        for (int r = 0; r < group - 1; ++r) {
            row.put(red.dummy_good(l, r));
        }
        row.put(red.main_good(u));
        row.put(red.main_good(v));
        for (int i = 0; i < q; ++i) {
            for (int r = 0; r < k - 1; ++r) {
                row.put(red.selector(i, r));
            }
        }
        row.put(red.dummy_good(l, group - 1));
        const Ranking shared = row.finish();
        for (int r = 0; r < group; ++r) {
            profile[red.dummy_agent(l, r)] = shared;
        }
    }
    red.instance = Instance(std::move(labels), std::move(profile));
    return red;
}

bool is_triangle_partition(const TripartiteGraph& g, const TrianglePartition& p)
{
    if (static_cast<int>(p.size()) != g.q) {
        return false;
    }
    std::vector<bool> used(g.num_vertices(), false);
    for (const Triangle& tri : p) {
        for (int a = 0; a < 3; ++a) {
            if (tri[a] < 0 || tri[a] >= g.num_vertices() || used[tri[a]]) {
                return false;
            }
            used[tri[a]] = true;
            for (int b = 0; b < a; ++b) {
                if (!g.adjacent(tri[a], tri[b])) {
                    return false;
                }
            }
        }
    }
    return true;
}

Allocation encode_pit(const PitReduction& red, const TrianglePartition& p)
{
    if (!is_triangle_partition(red.graph, p)) {
        throw std::invalid_argument("not a partition of the graph into triangles");
    }
    Allocation out(red.instance.num_agents());
    for (int i = 0; i < red.q(); ++i) {
        for (int v : p[i]) {
            out.assign(red.main_good(v), red.main_agent(i));
        }
        for (int r = 0; r < red.k - 1; ++r) {
            out.assign(red.selector(i, r), red.main_agent(i));
        }
    }
    for (int l = 0; l < red.t(); ++l) {
        for (int r = 0; r < red.group_size(); ++r) {
            out.assign(red.dummy_good(l, r), red.dummy_agent(l, r));
        }
    }
    return out;
}

TrianglePartition decode_pit(const PitReduction& red, const Allocation& a)
{
    validate_allocation(red.instance, a);
    if (!a.is_complete(red.instance) || !is_rank_maximal(red.instance, a)) {
        throw std::invalid_argument("allocation is not rank-maximal on the reduced instance");
    }
    if (!is_ef_k(red.instance, a, red.k)) {
        throw std::invalid_argument("allocation is not EF" + std::to_string(red.k) + " on the reduced instance");
    }
    TrianglePartition out;
    for (int i = 0; i < red.q(); ++i) {
        std::vector<int> vertices;
        for (int v = 0; v < 3 * red.q(); ++v) {
            if (a.bundle(red.main_agent(i)).contains(red.main_good(v))) {
                vertices.push_back(v);
            }
        }
        if (vertices.size() != 3) {
            throw InternalError("main agent " + std::to_string(i + 1) + " holds " + std::to_string(vertices.size())
                                + " main goods");
        }
        out.push_back({vertices[0], vertices[1], vertices[2]});
    }
    if (!is_triangle_partition(red.graph, out)) {
        throw InternalError("decoded triples are not triangles of the graph");
    }
    return out;
}

namespace {

bool cover(const TripartiteGraph& g, std::vector<bool>& used, TrianglePartition& acc)
{
    const auto first = std::find(used.begin(), used.end(), false);
    if (first == used.end()) {
        return true;
    }
    const int u = static_cast<int>(first - used.begin());
    used[u] = true;
    for (int v = u + 1; v < g.num_vertices(); ++v) {
        if (used[v] || !g.adjacent(u, v)) {
            continue;
        }
        used[v] = true;
        for (int w = v + 1; w < g.num_vertices(); ++w) {
            if (used[w] || !g.adjacent(u, w) || !g.adjacent(v, w)) {
                continue;
            }
            used[w] = true;
            acc.push_back({u, v, w});
            if (cover(g, used, acc)) {
                return true;
            }
            acc.pop_back();
            used[w] = false;
        }
        used[v] = false;
    }
    used[u] = false;
    return false;
}

} // namespace

std::optional<TrianglePartition> pit_brute_force(const TripartiteGraph& g)
{
    validate_graph(g);
    if (g.num_vertices() > 12) {
        throw BudgetExceeded("triangle-partition enumeration is limited to 12 vertices");
    }
    std::vector<bool> used(g.num_vertices(), false);
    TrianglePartition acc;
    if (cover(g, used, acc)) {
        return acc;
    }
    return std::nullopt;
}

} // namespace lexfair
