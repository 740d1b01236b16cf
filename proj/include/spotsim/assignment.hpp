#pragma once

#include <utility>
#include <vector>

#include "spotsim/grid.hpp"

namespace spotsim {

/// Minimum-cost square assignment (Jonker-Volgenant shortest augmenting
/// path). cost is n x n row-major; returns the column assigned to each row.
std::vector<int> solve_assignment(const std::vector<double>& cost, int n);

struct MatchResult {
    std::vector<std::pair<int, int>> pairs;  // (index in a, index in b)
    double total_distance = 0.0;
};

/// One-to-one matching between point sets that maximizes the number of pairs
/// with distance <= eta, breaking ties by minimal total matched distance.
/// Pairs farther than eta are never matched.
MatchResult match_points(const PointArray& a, const PointArray& b, double eta);

}  // namespace spotsim
