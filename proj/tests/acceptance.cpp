// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line. Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spotsim/dynamics.hpp"
#include "spotsim/eval.hpp"
#include "spotsim/pipeline.hpp"
#include "spotsim/render.hpp"
#include "spotsim/rng.hpp"
#include "spotsim/scene.hpp"
#include "spotsim/tps.hpp"

using namespace spotsim;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool check(bool ok, const char* what, std::string& detail) {
    if (!ok) {
        detail += detail.empty() ? "" : "; ";
        detail += what;
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 1. Oscillator transient matches the critically damped closed form.
bool criterion_oscillator(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    auto osc = make_oscillator({1.0}, {0.0}, 10.0);
    const std::vector<double> zero{0.0};
    bool ok = true;
    double prev = osc.value[0];
    for (int t = 1; t <= 10; ++t) {
        oscillator_step(osc, zero, 1.0);
        ok &= check(osc.value[0] <= prev, "trajectory not monotone", detail);
        prev = osc.value[0];
    }
    const double analytic = 2.0 * std::exp(-1.0);
    ok &= check(std::abs(osc.value[0] - analytic) / analytic < 0.05,
                "value at t=tau off by more than 5%", detail);
    ok &= check(seconds_since(start) < 1.0, "runtime >= 1 s", detail);
    return ok;
}

// 2. Calibrated random forces reach the target stationary spreads.
bool criterion_calibration(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    const struct {
        double target;
        const char* label;
    } cases[] = {{kPi / 30.0, "angle"}, {0.05, "size"}};
    for (const auto& c : cases) {
        const double sigma_f = calibrate_force_std(c.target, 10.0, 1.0);
        auto osc = make_oscillator({0.0}, {0.0}, 10.0);
        Rng rng(derive_stream(2024, c.label, 0));
        std::vector<double> force(1);
        double sq = 0.0;
        const int burn_in = 2000, n = 100000;
        for (int i = 0; i < burn_in + n; ++i) {
            force[0] = sigma_f * rng.normal();
            oscillator_step(osc, force, 1.0);
            if (i >= burn_in) sq += osc.value[0] * osc.value[0];
        }
        const double std_hat = std::sqrt(sq / n);
        ok &= check(std::abs(std_hat - c.target) < 0.05 * c.target,
                    "sample std off by more than 5%", detail);
    }
    ok &= check(seconds_since(start) < 10.0, "runtime >= 10 s", detail);
    return ok;
}

// 3. TPS interpolates exactly and reproduces affine correspondences.
bool criterion_tps(std::string& detail) {
    bool ok = true;
    for (const int dim : {2, 3}) {
        Rng rng(derive_stream(2025, "tps", static_cast<std::uint64_t>(dim)));
        PointArray source(20, dim), target(20, dim);
        for (double& v : source.data) v = rng.uniform(0.0, 120.0);
        for (std::size_t i = 0; i < 20; ++i)
            for (int ax = 0; ax < dim; ++ax) target[i][ax] = source[i][ax] + rng.uniform(-8.0, 8.0);

        const TpsWarp warp = fit_tps(source, target, 0.0);
        const PointArray mapped = apply_tps(warp, source);
        for (std::size_t i = 0; i < 20; ++i)
            ok &= check(distance(mapped[i], target[i], dim) < 1e-8,
                        "control-point residual >= 1e-8", detail);

        double a[3][3] = {}, b[3] = {};
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) a[r][c] = (r == c ? 1.0 : 0.0) + rng.uniform(-0.2, 0.2);
            b[r] = rng.uniform(-10.0, 10.0);
        }
        PointArray affine_target(20, dim);
        for (std::size_t i = 0; i < 20; ++i)
            for (int r = 0; r < dim; ++r) {
                affine_target[i][r] = b[r];
                for (int c = 0; c < dim; ++c) affine_target[i][r] += a[r][c] * source[i][c];
            }
        const TpsWarp affine_warp = fit_tps(source, affine_target, 0.0);
        for (int trial = 0; trial < 100; ++trial) {
            double p[3], expect[3], got[3];
            for (int ax = 0; ax < dim; ++ax) p[ax] = rng.uniform(-20.0, 140.0);
            for (int r = 0; r < dim; ++r) {
                expect[r] = b[r];
                for (int c = 0; c < dim; ++c) expect[r] += a[r][c] * p[c];
            }
            apply_tps(affine_warp, p, got);
            for (int ax = 0; ax < dim; ++ax)
                ok &= check(std::abs(got[ax] - expect[ax]) < 1e-8,
                            "affine probe error >= 1e-8", detail);
        }
    }
    return ok;
}

// 4. Poisson noise moments at the default operating point.
bool criterion_poisson(std::string& detail) {
    ImageBuffer img({1000, 1000});
    for (double& v : img.data) v = 0.5;
    const ImageBuffer noisy = shot_noise(img, 50.0, derive_stream(2026, "poisson", 0));
    double sum = 0, sq = 0;
    for (double v : noisy.data) {
        sum += v;
        sq += v * v;
    }
    const double n = static_cast<double>(noisy.data.size());
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    bool ok = check(std::abs(mean - 0.5) < 0.01 * 0.5, "mean off by more than 1%", detail);
    ok &= check(std::abs(var - 0.01) < 0.03 * 0.01, "variance off by more than 3%", detail);
    return ok;
}

// 5. Rendering peak values and fixed background normalization.
bool criterion_rendering(std::string& detail) {
    SceneProfile particle;
    particle.position = {10.0, 10.0, 0.0};
    particle.base_sizes = {1.0, 1.0, 1.0};
    particle.size_osc = make_oscillator({1.0, 1.0}, {1.0, 1.0}, 10.0);
    particle.angle_osc = make_oscillator({0.0}, {0.0}, 10.0);
    const Dims dims{21, 21};
    const ImageBuffer img = render_profiles({particle}, dims);
    const int center[2] = {10, 10}, off[2] = {11, 10};
    bool ok = check(std::abs(img.data[voxel_index(dims, center)] - 1.0) < 1e-6,
                    "particle peak != 1", detail);
    ok &= check(std::abs(img.data[voxel_index(dims, off)] - std::exp(-0.5)) < 1e-6,
                "1-sigma value != exp(-1/2)", detail);

    // Background term at t = 0 tops out at exactly (1 - alpha) by the gain
    // definition, whatever the blobs look like.
    Rng rng(derive_stream(2027, "render", 0));
    std::vector<SceneProfile> blobs;
    for (int i = 0; i < 6; ++i) {
        SceneProfile blob;
        blob.position = {rng.uniform(30.0, 90.0), rng.uniform(30.0, 90.0), 0.0};
        blob.base_sizes = {rng.uniform(20.0, 60.0), rng.uniform(20.0, 60.0), 1.0};
        blob.size_osc = make_oscillator({1.0, 1.0}, {1.0, 1.0}, 10.0);
        blob.angle_osc = make_oscillator({rng.uniform(0.0, kPi)}, {0.0}, 10.0);
        blobs.push_back(blob);
    }
    const Dims bg_dims{128, 128};
    const ImageBuffer bg = render_profiles(blobs, bg_dims);
    NoiseParams params;
    params.alpha = 0.2;
    params.delta = 50.0;
    params.gain = background_gain(bg);
    const ImageBuffer mixed = mix(ImageBuffer(bg_dims), bg, params);
    double max_v = 0.0;
    for (double v : mixed.data) max_v = std::max(max_v, v);
    ok &= check(std::abs(max_v - (1.0 - params.alpha)) < 1e-6,
                "background term max != 1 - alpha", detail);
    return ok;
}

// 6. HOTA identity, the mid-sequence ID-switch fixture, and optimality of the
// matcher against brute force.
bool criterion_hota(std::string& detail) {
    TrackSet gt;
    gt.dim = 2;
    gt.frame_count = 100;
    for (std::int64_t t = 0; t < 100; ++t) {
        gt.tracks[0][t] = {10.0, 10.0, 0.0};
        gt.tracks[1][t] = {10.0, 30.0, 0.0};
    }
    bool ok = check(hota(gt, gt, 2.0).hota == 1.0, "identity HOTA != 1", detail);

    TrackSet pred;
    pred.dim = 2;
    pred.frame_count = 100;
    for (std::int64_t t = 0; t < 100; ++t) {
        pred.tracks[t < 50 ? 1 : 3][t] = gt.tracks.at(0).at(t);
        pred.tracks[t < 50 ? 2 : 4][t] = gt.tracks.at(1).at(t);
    }
    const HotaScores swap = hota(gt, pred, 2.0);
    ok &= check(std::abs(swap.hota - std::sqrt(0.5)) < 1e-9,
                "ID-switch fixture HOTA != sqrt(0.5)", detail);

    Rng rng(derive_stream(2028, "hota", 0));
    for (int trial = 0; trial < 1000; ++trial) {
        const int na = static_cast<int>(rng.uniform_int(7));
        const int nb = static_cast<int>(rng.uniform_int(7));
        PointArray a(static_cast<std::size_t>(na), 2), b(static_cast<std::size_t>(nb), 2);
        for (double& v : a.data) v = rng.uniform(0.0, 6.0);
        for (double& v : b.data) v = rng.uniform(0.0, 6.0);
        const double eta = rng.uniform(0.5, 3.0);
        const MatchResult got = match_points(a, b, eta);
        const oracles::BruteMatch expect = oracles::brute_force_match(a, b, eta);
        if (static_cast<int>(got.pairs.size()) != expect.count) {
            ok = check(false, "matcher below brute-force cardinality", detail);
            break;
        }
    }
    return ok;
}

SimulationConfig desk_config(const fs::path& out, std::uint64_t seed, double a_max) {
    SimulationConfig c = preset("springs-2d");
    c.dims = {256, 256};
    c.frames = 100;
    c.scene.particles = 100;
    c.springs.a_max = a_max;
    c.seed = seed;
    c.out_dir = out.string();
    return c;
}

// 7. Desk-scale 2D springs run: timing, self-HOTA, min-distance, determinism.
bool criterion_desk_2d(std::string& detail) {
    const fs::path base = fs::temp_directory_path() / "spotsim_accept_2d";
    fs::remove_all(base);
    const auto start = std::chrono::steady_clock::now();
    const GenerateResult run_a = generate(desk_config(base / "a", 1234, 4.0));
    const double elapsed = seconds_since(start);
    bool ok = check(elapsed < 60.0, "generate took >= 60 s", detail);

    const TrackSet gt = read_track_set(run_a.tracks_path);
    ok &= check(hota(gt, gt, 2.0).hota == 1.0, "gt self-HOTA != 1", detail);

    PointArray first(gt.tracks.size(), 2);
    std::size_t i = 0;
    for (const auto& [id, traj] : gt.tracks) {
        first[i][0] = traj.at(0)[0];
        first[i][1] = traj.at(0)[1];
        ++i;
    }
    double min_dist = 1e18;
    for (std::size_t p = 0; p < first.size(); ++p)
        for (std::size_t q = p + 1; q < first.size(); ++q)
            min_dist = std::min(min_dist, distance(first[p], first[q], 2));
    // 2e-6 covers the 6-decimal quantization of the exported positions.
    ok &= check(min_dist >= 6.0 - 2e-6, "pairwise distance at t=0 below min_dist", detail);

    const GenerateResult run_b = generate(desk_config(base / "b", 1234, 4.0));
    ok &= check(slurp(run_a.tracks_path) == slurp(run_b.tracks_path),
                "tracks differ across identical runs", detail);
    for (int t = 0; t < 100; t += 33) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.raw", t);
        ok &= check(slurp(base / "a" / name) == slurp(base / "b" / name),
                    "frames differ across identical runs", detail);
    }
    fs::remove_all(base);
    return ok;
}

// 8. Desk-scale 3D springs run with the same invariants.
bool criterion_desk_3d(std::string& detail) {
    const fs::path base = fs::temp_directory_path() / "spotsim_accept_3d";
    fs::remove_all(base);
    SimulationConfig c = preset("springs-3d");
    c.dims = {64, 64, 64};
    c.frames = 20;
    c.scene.particles = 50;
    c.seed = 99;
    c.out_dir = (base / "a").string();

    const auto start = std::chrono::steady_clock::now();
    const GenerateResult run_a = generate(c);
    const double elapsed = seconds_since(start);
    bool ok = check(elapsed < 120.0, "generate took >= 120 s", detail);

    const TrackSet gt = read_track_set(run_a.tracks_path);
    ok &= check(gt.dim == 3, "track file not 3D", detail);
    ok &= check(hota(gt, gt, 2.0).hota == 1.0, "gt self-HOTA != 1", detail);

    PointArray first(gt.tracks.size(), 3);
    std::size_t i = 0;
    for (const auto& [id, traj] : gt.tracks) {
        for (int ax = 0; ax < 3; ++ax) first[i][ax] = traj.at(0)[static_cast<std::size_t>(ax)];
        ++i;
    }
    double min_dist = 1e18;
    for (std::size_t p = 0; p < first.size(); ++p)
        for (std::size_t q = p + 1; q < first.size(); ++q)
            min_dist = std::min(min_dist, distance(first[p], first[q], 3));
    ok &= check(min_dist >= 4.0 - 2e-6, "pairwise distance at t=0 below min_dist", detail);

    c.out_dir = (base / "b").string();
    const GenerateResult run_b = generate(c);
    ok &= check(slurp(run_a.tracks_path) == slurp(run_b.tracks_path),
                "tracks differ across identical runs", detail);
    ok &= check(slurp(base / "a" / "frame_0007.raw") == slurp(base / "b" / "frame_0007.raw"),
                "frames differ across identical runs", detail);
    fs::remove_all(base);
    return ok;
}

// 9. Faster tissue motion degrades the near-constant-position baseline.
bool criterion_tracker_ordering(std::string& detail) {
    const fs::path base = fs::temp_directory_path() / "spotsim_accept_order";
    fs::remove_all(base);
    const double max_link = 5.0;

    std::vector<double> mean_hota;
    for (const double a_max : {1.0, 2.0, 3.0, 4.0}) {
        double sum = 0.0;
        for (const std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
            SimulationConfig c = desk_config(
                base / ("r" + std::to_string(seed) + "_" + std::to_string(a_max)), seed, a_max);
            const GenerateResult r = generate(c, {.write_images = false});
            const TrackSet gt = read_track_set(r.tracks_path);

            // Perfect detections: the ground-truth positions per frame.
            std::vector<PointArray> dets(static_cast<std::size_t>(gt.frame_count));
            for (std::int64_t t = 0; t < gt.frame_count; ++t) {
                std::vector<std::array<double, 3>> pts;
                for (const auto& [id, traj] : gt.tracks)
                    if (traj.count(t)) pts.push_back(traj.at(t));
                PointArray arr(pts.size(), 2);
                for (std::size_t p = 0; p < pts.size(); ++p)
                    for (int ax = 0; ax < 2; ++ax) arr[p][ax] = pts[p][ax];
                dets[static_cast<std::size_t>(t)] = std::move(arr);
            }
            const TrackSet pred = greedy_nn_tracker(dets, max_link, 2);
            sum += hota(gt, pred, 2.0).hota;
        }
        mean_hota.push_back(sum / 3.0);
    }
    fs::remove_all(base);

    bool ok = check(mean_hota[0] >= 0.8, "HOTA at a_max=1 below 0.8", detail);
    for (std::size_t i = 1; i < mean_hota.size(); ++i)
        ok &= check(mean_hota[i] < mean_hota[i - 1], "HOTA not strictly decreasing in a_max",
                    detail);
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "mean HOTA = %.3f / %.3f / %.3f / %.3f", mean_hota[0],
                      mean_hota[1], mean_hota[2], mean_hota[3]);
        detail += detail.empty() ? "" : "; ";
        detail += buf;
    }
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 oscillator transient matches the analytic solution", criterion_oscillator},
        {"2 force calibration reaches target spreads", criterion_calibration},
        {"3 TPS interpolation and affine reproduction", criterion_tps},
        {"4 Poisson noise moments", criterion_poisson},
        {"5 rendering peaks and background normalization", criterion_rendering},
        {"6 HOTA oracle values and matcher optimality", criterion_hota},
        {"7 desk-scale 2D springs pipeline", criterion_desk_2d},
        {"8 desk-scale 3D springs pipeline", criterion_desk_3d},
        {"9 tracker degrades with faster motion", criterion_tracker_ordering},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %s%s%s\n", ok ? "PASS" : "FAIL", c.name,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}
