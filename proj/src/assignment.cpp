#include "spotsim/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace spotsim {

std::vector<int> solve_assignment(const std::vector<double>& cost, int n) {
    if (n < 0 || cost.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw std::invalid_argument("solve_assignment: cost matrix must be n x n");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // Shortest-augmenting-path formulation with 1-based potentials.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> col_to_row(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        col_to_row[0] = i;
        int j0 = 0;
        std::vector<double> min_slack(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = col_to_row[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur =
                    cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < min_slack[j]) {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[col_to_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (col_to_row[j0] != 0);
        do {
            const int j1 = way[j0];
            col_to_row[j0] = col_to_row[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (col_to_row[j] > 0) row_to_col[col_to_row[j] - 1] = j - 1;
    return row_to_col;
}

namespace {

struct Edge {
    int a, b;
    double dist;
};

// Union-find over the combined node set (a-nodes then b-nodes).
int find_root(std::vector<int>& parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

// Max-cardinality min-cost matching on one connected component via a square
// assignment with per-node "stay unmatched" dummies. Any feasible edge costs
// its distance; leaving a node unmatched costs eta + 1, so each extra match
// strictly lowers the objective and ties resolve to minimal total distance.
void match_component(const std::vector<int>& a_nodes, const std::vector<int>& b_nodes,
                     const std::vector<Edge>& edges, double eta, MatchResult& result) {
    const int na = static_cast<int>(a_nodes.size());
    const int nb = static_cast<int>(b_nodes.size());
    const int n = na + nb;
    const double unmatched = eta + 1.0;
    const double forbidden = 4.0 * unmatched * (n + 1);

    std::vector<double> cost(static_cast<std::size_t>(n) * n, forbidden);
    const auto at = [&](int r, int c) -> double& {
        return cost[static_cast<std::size_t>(r) * n + c];
    };
    std::map<int, int> a_index, b_index;
    for (int i = 0; i < na; ++i) a_index[a_nodes[i]] = i;
    for (int j = 0; j < nb; ++j) b_index[b_nodes[j]] = j;
    for (const Edge& e : edges) at(a_index[e.a], b_index[e.b]) = e.dist;
    for (int i = 0; i < na; ++i) at(i, nb + i) = unmatched;
    for (int j = 0; j < nb; ++j) at(na + j, j) = unmatched;
    for (int r = na; r < n; ++r)
        for (int c = nb; c < n; ++c) at(r, c) = 0.0;

    const std::vector<int> row_to_col = solve_assignment(cost, n);
    for (int i = 0; i < na; ++i) {
        const int c = row_to_col[i];
        if (c >= 0 && c < nb && at(i, c) < unmatched) {
            result.pairs.emplace_back(a_nodes[i], b_nodes[c]);
            result.total_distance += at(i, c);
        }
    }
}

}  // namespace

MatchResult match_points(const PointArray& a, const PointArray& b, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("match_points: eta must be positive");
    MatchResult result;
    if (a.size() == 0 || b.size() == 0) return result;
    if (a.dim != b.dim) throw std::invalid_argument("match_points: dimensionality mismatch");
    const int dim = a.dim;

    // Cell hash at pitch eta: all feasible partners of a point live in the
    // 3^d neighborhood of its cell.
    const auto key_of = [&](const double* p) {
        std::int64_t key = 0;
        for (int ax = 0; ax < dim; ++ax)
            key = key * (1 << 21) + (static_cast<std::int64_t>(std::floor(p[ax] / eta)) & 0x1FFFFF);
        return key;
    };
    std::map<std::int64_t, std::vector<int>> b_cells;
    for (std::size_t j = 0; j < b.size(); ++j) b_cells[key_of(b[j])].push_back(static_cast<int>(j));

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int off[3] = {0, 0, 0};
        const int zr = dim == 3 ? 1 : 0;
        for (off[2] = -zr; off[2] <= zr; ++off[2])
            for (off[1] = -1; off[1] <= 1; ++off[1])
                for (off[0] = -1; off[0] <= 1; ++off[0]) {
                    double probe[3];
                    for (int ax = 0; ax < dim; ++ax) probe[ax] = a[i][ax] + off[ax] * eta;
                    const auto it = b_cells.find(key_of(probe));
                    if (it == b_cells.end()) continue;
                    for (int j : it->second) {
                        const double d = distance(a[i], b[static_cast<std::size_t>(j)], dim);
                        if (d <= eta) edges.push_back({static_cast<int>(i), j, d});
                    }
                }
    }
    if (edges.empty()) return result;

    // Connected components of the feasibility graph; nodes 0..na-1 are
    // a-points, na..na+nb-1 are b-points.
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    std::vector<int> parent(na + nb);
    std::iota(parent.begin(), parent.end(), 0);
    for (const Edge& e : edges) {
        const int ra = find_root(parent, e.a);
        const int rb = find_root(parent, na + e.b);
        if (ra != rb) parent[ra] = rb;
    }

    std::map<int, std::vector<int>> comp_a, comp_b;
    std::map<int, std::vector<Edge>> comp_edges;
    for (const Edge& e : edges) comp_edges[find_root(parent, e.a)].push_back(e);
    for (int i = 0; i < na; ++i) {
        const int r = find_root(parent, i);
        if (comp_edges.count(r)) comp_a[r].push_back(i);
    }
    for (int j = 0; j < nb; ++j) {
        const int r = find_root(parent, na + j);
        if (comp_edges.count(r)) comp_b[r].push_back(j);
    }
    for (const auto& [root, comp] : comp_edges)
        match_component(comp_a[root], comp_b[root], comp, eta, result);

    std::sort(result.pairs.begin(), result.pairs.end());
    return result;
}

}  // namespace spotsim
