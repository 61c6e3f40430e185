#pragma once

#include <vector>

namespace lexfair {

/// Maximum bipartite matching by augmenting paths (Kuhn). `adjacency[u]` lists
/// the right vertices of left vertex u. Returns, for each left vertex, its
/// matched right vertex or -1.
std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adjacency, int right_count);

/// True iff every left vertex is matched in `match`.
bool saturates_left(const std::vector<int>& match);

} // namespace lexfair
