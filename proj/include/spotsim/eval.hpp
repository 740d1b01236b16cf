#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "spotsim/assignment.hpp"
#include "spotsim/grid.hpp"
#include "spotsim/mask.hpp"
#include "spotsim/rng.hpp"

namespace spotsim {

/// Ground-truth or predicted trajectories: track id -> frame -> position.
/// A track has at most one position per frame, frames in [0, frame_count).
struct TrackSet {
    std::map<std::int64_t, std::map<std::int64_t, std::array<double, 3>>> tracks;
    std::int64_t frame_count = 0;
    int dim = 2;
};

struct HotaScores {
    double hota = 0.0;
    double det_a = 0.0;
    double ass_a = 0.0;
    std::int64_t tp = 0;
    std::int64_t fn = 0;
    std::int64_t fp = 0;
};

/// Per-frame one-to-one matching under the distance gate eta: maximal number
/// of pairs with distance <= eta, ties broken by minimal total distance.
std::vector<std::pair<int, int>> match_frame(const PointArray& gt_points,
                                             const PointArray& pred_points, double eta);

/// Single-threshold HOTA at gate eta. DetA = TP/(TP+FN+FP); per TP pair the
/// association score is TPA/(TPA+FNA+FPA) over the whole sequence; AssA is
/// the mean over TPs and HOTA = sqrt(DetA * AssA).
HotaScores hota(const TrackSet& gt, const TrackSet& pred, double eta);

/// Parameterized detection degrader: each ground-truth position is dropped
/// with probability miss_rate, otherwise jittered by an isotropic Gaussian of
/// std jitter_std; Poisson(clutter_rate) false detections are added uniformly
/// inside the mask per frame.
std::vector<PointArray> degrade_tracks(const TrackSet& gt, double jitter_std, double miss_rate,
                                       double clutter_rate, const AnimalMask& mask, Rng& rng);

/// Reference baseline: frame-to-frame optimal assignment linking with gate
/// max_link. Unmatched detections start tracks; unmatched tracks terminate.
TrackSet greedy_nn_tracker(const std::vector<PointArray>& detections, double max_link, int dim);

}  // namespace spotsim
