#include "spotsim/eval.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spotsim {

std::vector<std::pair<int, int>> match_frame(const PointArray& gt_points,
                                             const PointArray& pred_points, double eta) {
    return match_points(gt_points, pred_points, eta).pairs;
}

namespace {

struct FramePoints {
    std::vector<std::int64_t> ids;
    PointArray points;
};

FramePoints collect_frame(const TrackSet& set, std::int64_t frame) {
    FramePoints out;
    for (const auto& [id, positions] : set.tracks) {
        const auto it = positions.find(frame);
        if (it != positions.end()) out.ids.push_back(id);
    }
    out.points = PointArray(out.ids.size(), set.dim);
    for (std::size_t i = 0; i < out.ids.size(); ++i) {
        const auto& pos = set.tracks.at(out.ids[i]).at(frame);
        for (int ax = 0; ax < set.dim; ++ax) out.points[i][ax] = pos[ax];
    }
    return out;
}

}  // namespace

HotaScores hota(const TrackSet& gt, const TrackSet& pred, double eta) {
    if (gt.frame_count != pred.frame_count)
        throw std::invalid_argument("hota: frame counts differ (" +
                                    std::to_string(gt.frame_count) + " vs " +
                                    std::to_string(pred.frame_count) + ")");
    if (!(eta > 0.0)) throw std::invalid_argument("hota: eta must be positive");

    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> pair_counts;
    std::map<std::int64_t, std::int64_t> gt_counts, pred_counts;
    HotaScores scores;

    for (std::int64_t t = 0; t < gt.frame_count; ++t) {
        const FramePoints g = collect_frame(gt, t);
        const FramePoints p = collect_frame(pred, t);
        for (std::int64_t id : g.ids) ++gt_counts[id];
        for (std::int64_t id : p.ids) ++pred_counts[id];
        if (g.ids.empty() || p.ids.empty()) {
            scores.fn += static_cast<std::int64_t>(g.ids.size());
            scores.fp += static_cast<std::int64_t>(p.ids.size());
            continue;
        }
        const auto pairs = match_frame(g.points, p.points, eta);
        for (const auto& [gi, pi] : pairs)
            ++pair_counts[{g.ids[static_cast<std::size_t>(gi)],
                           p.ids[static_cast<std::size_t>(pi)]}];
        scores.tp += static_cast<std::int64_t>(pairs.size());
        scores.fn += static_cast<std::int64_t>(g.ids.size() - pairs.size());
        scores.fp += static_cast<std::int64_t>(p.ids.size() - pairs.size());
    }

    const std::int64_t total = scores.tp + scores.fn + scores.fp;
    if (total == 0) {
        // Two empty track sets agree perfectly.
        scores.det_a = scores.ass_a = scores.hota = 1.0;
        return scores;
    }
    scores.det_a = static_cast<double>(scores.tp) / static_cast<double>(total);

    double ass_sum = 0.0;
    for (const auto& [ids, tpa] : pair_counts) {
        // TPA + FNA + FPA: frames where the gt id appears plus frames where
        // the pred id appears, counting their co-occurrences once.
        const std::int64_t denom = gt_counts[ids.first] + pred_counts[ids.second] - tpa;
        ass_sum += static_cast<double>(tpa) *
                   (static_cast<double>(tpa) / static_cast<double>(denom));
    }
    scores.ass_a = scores.tp > 0 ? ass_sum / static_cast<double>(scores.tp) : 0.0;
    scores.hota = std::sqrt(scores.det_a * scores.ass_a);
    return scores;
}

std::vector<PointArray> degrade_tracks(const TrackSet& gt, double jitter_std, double miss_rate,
                                       double clutter_rate, const AnimalMask& mask, Rng& rng) {
    if (!(jitter_std >= 0.0) || !(miss_rate >= 0.0) || miss_rate > 1.0 || !(clutter_rate >= 0.0))
        throw std::invalid_argument("degrade_tracks: rates must be non-negative (miss_rate <= 1)");
    const int dim = gt.dim;

    std::vector<std::size_t> inside;
    if (clutter_rate > 0.0) {
        for (std::size_t v = 0; v < mask.grid.size(); ++v)
            if (mask.grid[v]) inside.push_back(v);
        if (inside.empty())
            throw std::invalid_argument("degrade_tracks: clutter requested on an empty mask");
    }

    std::vector<PointArray> detections(static_cast<std::size_t>(gt.frame_count));
    for (std::int64_t t = 0; t < gt.frame_count; ++t) {
        std::vector<std::array<double, 3>> pts;
        for (const auto& [id, positions] : gt.tracks) {
            const auto it = positions.find(t);
            if (it == positions.end()) continue;
            if (rng.uniform01() < miss_rate) continue;
            std::array<double, 3> p = it->second;
            for (int ax = 0; ax < dim; ++ax) p[ax] += jitter_std * rng.normal();
            pts.push_back(p);
        }
        if (clutter_rate > 0.0) {
            const std::int64_t extra = rng.poisson(clutter_rate);
            int coord[3] = {0, 0, 0};
            for (std::int64_t c = 0; c < extra; ++c) {
                const std::size_t v = inside[rng.uniform_int(inside.size())];
                voxel_coord(mask.dims, v, coord);
                std::array<double, 3> p{0, 0, 0};
                for (int ax = 0; ax < dim; ++ax) p[ax] = coord[ax] + rng.uniform01();
                pts.push_back(p);
            }
        }
        PointArray arr(pts.size(), dim);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (int ax = 0; ax < dim; ++ax) arr[i][ax] = pts[i][ax];
        detections[static_cast<std::size_t>(t)] = std::move(arr);
    }
    return detections;
}

TrackSet greedy_nn_tracker(const std::vector<PointArray>& detections, double max_link, int dim) {
    if (!(max_link > 0.0)) throw std::invalid_argument("greedy_nn_tracker: max_link must be positive");

    TrackSet out;
    out.dim = dim;
    out.frame_count = static_cast<std::int64_t>(detections.size());

    struct ActiveTrack {
        std::int64_t id;
        std::array<double, 3> head;
    };
    std::vector<ActiveTrack> active;
    std::int64_t next_id = 0;

    for (std::int64_t t = 0; t < out.frame_count; ++t) {
        const PointArray& dets = detections[static_cast<std::size_t>(t)];
        std::vector<char> det_used(dets.size(), 0);
        std::vector<ActiveTrack> survivors;

        if (!active.empty() && dets.size() > 0) {
            PointArray heads(active.size(), dim);
            for (std::size_t i = 0; i < active.size(); ++i)
                for (int ax = 0; ax < dim; ++ax) heads[i][ax] = active[i].head[ax];
            for (const auto& [hi, di] : match_points(heads, dets, max_link).pairs) {
                ActiveTrack& tr = active[static_cast<std::size_t>(hi)];
                std::array<double, 3> p{0, 0, 0};
                for (int ax = 0; ax < dim; ++ax) p[ax] = dets[static_cast<std::size_t>(di)][ax];
                out.tracks[tr.id][t] = p;
                tr.head = p;
                survivors.push_back(tr);
                det_used[static_cast<std::size_t>(di)] = 1;
            }
        }
        for (std::size_t di = 0; di < dets.size(); ++di) {
            if (det_used[di]) continue;
            std::array<double, 3> p{0, 0, 0};
            for (int ax = 0; ax < dim; ++ax) p[ax] = dets[di][ax];
            const std::int64_t id = next_id++;
            out.tracks[id][t] = p;
            survivors.push_back({id, p});
        }
        active = std::move(survivors);
    }
    return out;
}

}  // namespace spotsim
