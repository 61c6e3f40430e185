#pragma once

#include "lexfair/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lexfair {

// ---- (2/2/3)-SAT -----------------------------------------------------------------

struct Literal {
    int var = 0; ///< 0-based
    bool negated = false;
    friend bool operator==(const Literal&, const Literal&) = default;
};

/// CNF with three literals per clause. The (2/2/3) restriction (each variable
/// twice positive and twice negative, in four distinct clauses) is checked by
/// validate_223sat, not by the type.
struct SatInstance {
    int r = 0;
    std::vector<std::array<Literal, 3>> clauses;
    friend bool operator==(const SatInstance&, const SatInstance&) = default;
};

using TruthAssignment = std::vector<bool>;

/// Empty string when valid, otherwise the first problem found.
std::string sat_223_problem(const SatInstance& sat);
inline bool validate_223sat(const SatInstance& sat) { return sat_223_problem(sat).empty(); }

bool satisfies(const SatInstance& sat, const TruthAssignment& a);

/// Exhaustive search over 2^r assignments (lowest binary value first, bit i = variable i).
/// Throws BudgetExceeded when r > 20.
std::optional<TruthAssignment> sat_brute_force(const SatInstance& sat);

/// "p cnf r s" header followed by s clause lines of three non-zero literals ending in 0.
SatInstance parse_dimacs(std::string_view text);
std::string serialize_dimacs(const SatInstance& sat);

/// Uniformly shuffles the 4r literal occurrences into the 4r/3 clause slots
/// until no clause repeats a variable. Requires r to be a positive multiple of 3.
SatInstance random_223sat(int r, std::mt19937_64& rng);

/// The reduced instance with index helpers. Agents: x_i = 2i, xbar_i = 2i+1,
/// d_i = 2r+2i, dbar_i = 2r+2i+1. Goods are numbered in reference order:
/// S_1, Sbar_1, ..., S_r, Sbar_r, T_1..T_r, C_1..C_s, B_1..B_r.
struct SatReduction {
    SatInstance sat;
    Instance instance;

    int r() const { return sat.r; }
    int s() const { return static_cast<int>(sat.clauses.size()); }
    AgentId x(int i) const { return 2 * i; }
    AgentId xbar(int i) const { return 2 * i + 1; }
    AgentId literal_agent(const Literal& l) const { return l.negated ? xbar(l.var) : x(l.var); }
    AgentId d(int i) const { return 2 * r() + 2 * i; }
    AgentId dbar(int i) const { return 2 * r() + 2 * i + 1; }
    GoodId S(int i) const { return 2 * i; }
    GoodId Sbar(int i) const { return 2 * i + 1; }
    GoodId T(int i) const { return 2 * r() + i; }
    GoodId C(int j) const { return 3 * r() + j; }
    GoodId B(int i) const { return 3 * r() + s() + i; }
};

/// Throws std::invalid_argument when `sat` is not a valid (2/2/3) instance.
SatReduction reduce_sat(const SatInstance& sat);

/// Throws std::invalid_argument when `a` leaves some clause unsatisfied.
Allocation encode_sat_assignment(const SatReduction& red, const TruthAssignment& a);

/// Throws std::invalid_argument when `a` is not EFX and rank-maximal on the
/// reduced instance; InternalError if the decoded assignment fails a clause.
TruthAssignment decode_sat(const SatReduction& red, const Allocation& a);

/// The shape every EFX+RM allocation of a reduced instance must have:
/// signature goods with their literal agents, clause goods with a literal
/// agent of that clause, one dummy good per dummy agent.
bool has_sat_structure(const SatReduction& red, const Allocation& a);

// ---- partition into triangles ---------------------------------------------------

/// Balanced tripartite graph on w_1..w_q (0..q-1), x_1..x_q (q..2q-1),
/// y_1..y_q (2q..3q-1). Edges are stored with the smaller vertex first.
struct TripartiteGraph {
    int q = 0;
    std::vector<std::pair<int, int>> edges;

    int num_vertices() const { return 3 * q; }
    int part(int v) const { return v / q; }
    bool adjacent(int u, int v) const;
    /// Every unordered non-adjacent pair (u < v), in lexicographic order.
    std::vector<std::pair<int, int>> non_edges() const;
    std::string vertex_name(int v) const;
    friend bool operator==(const TripartiteGraph&, const TripartiteGraph&) = default;
};

/// Throws std::invalid_argument on out-of-range, duplicate or intra-part edges.
void validate_graph(const TripartiteGraph& g);
TripartiteGraph complete_tripartite(int q);

/// "parts q" followed by "edge u v" lines naming vertices w1..wq, x1..xq, y1..yq.
TripartiteGraph parse_graph(std::string_view text);
std::string serialize_graph(const TripartiteGraph& g);

using Triangle = std::array<int, 3>;
using TrianglePartition = std::vector<Triangle>;

/// Agents: main a_1..a_q first, then dummy groups in non-edge order. Goods in
/// reference order: selector groups, W, X, Y, dummy groups.
struct PitReduction {
    TripartiteGraph graph;
    int k = 1;
    std::vector<std::pair<int, int>> non_edges;
    Instance instance;

    int q() const { return graph.q; }
    int t() const { return static_cast<int>(non_edges.size()); }
    int group_size() const { return (k + 2) * q() + 1; }
    AgentId main_agent(int i) const { return i; }
    AgentId dummy_agent(int group, int r) const { return q() + group * group_size() + r; }
    GoodId selector(int group, int r) const { return group * (k - 1) + r; }
    GoodId main_good(int v) const { return (k - 1) * q() + v; }
    GoodId dummy_good(int group, int r) const { return (k + 2) * q() + group * group_size() + r; }
};

/// Throws std::invalid_argument on an invalid graph or k < 1.
PitReduction reduce_pit(const TripartiteGraph& g, int k);

/// Triangle i goes to main agent a_i. Throws std::invalid_argument unless
/// `p` partitions the vertices into triangles of the graph.
Allocation encode_pit(const PitReduction& red, const TrianglePartition& p);

/// Throws std::invalid_argument when `a` is not EFk and rank-maximal;
/// InternalError when a decoded triple is not a triangle.
TrianglePartition decode_pit(const PitReduction& red, const Allocation& a);

/// True iff `p` partitions the vertices of `g` into triangles.
bool is_triangle_partition(const TripartiteGraph& g, const TrianglePartition& p);

/// Exhaustive search; throws BudgetExceeded when 3q > 12.
std::optional<TrianglePartition> pit_brute_force(const TripartiteGraph& g);

} // namespace lexfair
