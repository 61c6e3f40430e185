#include "lexfair/matching.hpp"

#include <algorithm>

namespace lexfair {

namespace {

bool augment(int u, const std::vector<std::vector<int>>& adjacency, std::vector<int>& match_left,
             std::vector<int>& match_right, std::vector<char>& visited)
{
    for (int v : adjacency[u]) {
        if (visited[v]) {
            continue;
        }
        visited[v] = 1;
        if (match_right[v] < 0 || augment(match_right[v], adjacency, match_left, match_right, visited)) {
            match_left[u] = v;
            match_right[v] = u;
            return true;
        }
    }
    return false;
}

} // namespace

std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adjacency, int right_count)
{
    std::vector<int> match_left(adjacency.size(), -1);
    std::vector<int> match_right(right_count, -1);
    std::vector<char> visited(right_count);
    for (int u = 0; u < static_cast<int>(adjacency.size()); ++u) {
        std::fill(visited.begin(), visited.end(), 0);
        augment(u, adjacency, match_left, match_right, visited);
    }
    return match_left;
}

bool saturates_left(const std::vector<int>& match)
{
    return std::none_of(match.begin(), match.end(), [](int v) { return v < 0; });
}

} // namespace lexfair
