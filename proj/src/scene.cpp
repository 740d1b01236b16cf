#include "spotsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace spotsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double unit_ball_volume(int dim) { return dim == 2 ? kPi : 4.0 * kPi / 3.0; }

}  // namespace

Ellipse sample_ellipse(const Dims& dims, double coverage, Rng& rng) {
    const int dim = ndim(dims);
    if (dim < 2 || dim > 3) throw std::invalid_argument("sample_ellipse: dims must be 2D or 3D");
    if (!(coverage > 0.0) || coverage > 0.9)
        throw std::invalid_argument("sample_ellipse: coverage must be in (0, 0.9]");

    double domain = 1.0;
    for (int ax = 0; ax < dim; ++ax) domain *= dims[ax];
    const double target = coverage * domain;
    const double base_radius = std::pow(target / unit_ball_volume(dim), 1.0 / dim);

    for (int attempt = 0; attempt < 64; ++attempt) {
        // Random anisotropy with unit geometric mean so the volume is kept.
        double ratio[3] = {1.0, 1.0, 1.0};
        double prod = 1.0;
        for (int ax = 0; ax < dim; ++ax) {
            ratio[ax] = rng.uniform(0.7, 1.4);
            prod *= ratio[ax];
        }
        const double norm = std::pow(prod, 1.0 / dim);

        Ellipse e;
        e.dim = dim;
        bool fits = true;
        for (int ax = 0; ax < dim; ++ax) {
            e.semi_axes[ax] = base_radius * ratio[ax] / norm;
            fits = fits && e.semi_axes[ax] <= 0.5 * dims[ax] - 1.0;
        }
        if (!fits) continue;
        for (int ax = 0; ax < dim; ++ax)
            e.center[ax] = rng.uniform(e.semi_axes[ax], dims[ax] - e.semi_axes[ax]);
        return e;
    }
    throw std::invalid_argument("sample_ellipse: coverage " + std::to_string(coverage) +
                                " is infeasible for the given dims");
}

AnimalMask rasterize_ellipse(const Ellipse& ellipse, const Dims& dims) {
    const int dim = ndim(dims);
    AnimalMask mask;
    mask.dims = dims;
    mask.grid.assign(voxel_count(dims), 0);
    const std::size_t voxels = mask.grid.size();
    int coord[3] = {0, 0, 0};
    for (std::size_t v = 0; v < voxels; ++v) {
        voxel_coord(dims, v, coord);
        double q = 0.0;
        for (int ax = 0; ax < dim; ++ax) {
            const double t = (coord[ax] + 0.5 - ellipse.center[ax]) / ellipse.semi_axes[ax];
            q += t * t;
        }
        if (q <= 1.0) mask.grid[v] = 1;
    }
    return mask;
}

AnimalMask sample_ellipse_mask(const Dims& dims, double coverage, Rng& rng) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        const Ellipse e = sample_ellipse(dims, coverage, rng);
        AnimalMask mask = rasterize_ellipse(e, dims);
        const double got =
            static_cast<double>(mask.true_count()) / static_cast<double>(voxel_count(dims));
        if (std::abs(got - coverage) <= 0.10 * coverage) return mask;
    }
    throw std::invalid_argument("sample_ellipse_mask: cannot reach requested coverage on this grid");
}

AnimalMask load_mask(const ImageBuffer& image, double threshold) {
    if (image.data.empty()) throw std::invalid_argument("load_mask: empty image");
    AnimalMask mask;
    mask.dims = image.dims;
    mask.grid.resize(image.data.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        mask.grid[i] = image.data[i] >= threshold ? 1 : 0;
        count += mask.grid[i];
    }
    if (count == 0) throw std::runtime_error("load_mask: threshold leaves an empty mask");
    return mask;
}

PointArray sample_positions(const AnimalMask& mask, std::size_t count, double min_dist, Rng& rng,
                            int max_attempts) {
    const int dim = ndim(mask.dims);
    if (count < 1) throw std::invalid_argument("sample_positions: count must be >= 1");
    if (max_attempts < 1) throw std::invalid_argument("sample_positions: max_attempts must be >= 1");

    std::vector<std::size_t> inside;
    for (std::size_t v = 0; v < mask.grid.size(); ++v)
        if (mask.grid[v]) inside.push_back(v);
    if (inside.empty()) throw std::invalid_argument("sample_positions: empty mask");

    // Uniform cell hash at min_dist pitch keeps the pairwise check O(1).
    const double cell = std::max(min_dist, 1.0);
    std::map<std::int64_t, std::vector<std::size_t>> buckets;
    const auto bucket_of = [&](const double* p) {
        std::int64_t key = 0;
        for (int ax = 0; ax < dim; ++ax)
            key = key * 1048576 + static_cast<std::int64_t>(std::floor(p[ax] / cell));
        return key;
    };

    PointArray points(count, dim);
    int coord[3] = {0, 0, 0};
    for (std::size_t i = 0; i < count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < max_attempts && !placed; ++attempt) {
            const std::size_t v = inside[rng.uniform_int(inside.size())];
            voxel_coord(mask.dims, v, coord);
            double p[3] = {0, 0, 0};
            for (int ax = 0; ax < dim; ++ax) p[ax] = coord[ax] + rng.uniform01();

            bool ok = true;
            if (min_dist > 0.0) {
                // Check candidates in the 3^d neighborhood of p's cell.
                int offsets[3] = {0, 0, 0};
                const int zr = dim == 3 ? 1 : 0;
                for (offsets[2] = -zr; offsets[2] <= zr && ok; ++offsets[2])
                    for (offsets[1] = -1; offsets[1] <= 1 && ok; ++offsets[1])
                        for (offsets[0] = -1; offsets[0] <= 1 && ok; ++offsets[0]) {
                            double q[3];
                            for (int ax = 0; ax < dim; ++ax) q[ax] = p[ax] + offsets[ax] * cell;
                            const auto it = buckets.find(bucket_of(q));
                            if (it == buckets.end()) continue;
                            for (std::size_t j : it->second)
                                if (distance(points[j], p, dim) < min_dist) {
                                    ok = false;
                                    break;
                                }
                        }
            }
            if (!ok) continue;
            for (int ax = 0; ax < dim; ++ax) points[i][ax] = p[ax];
            buckets[bucket_of(p)].push_back(i);
            placed = true;
        }
        if (!placed)
            throw std::runtime_error("sample_positions: packing failed after placing " +
                                     std::to_string(i) + " of " + std::to_string(count) +
                                     " points (min_dist too large for the mask)");
    }
    return points;
}

namespace {

SceneProfile make_profile(const double* position, int dim, double size_min, double size_max,
                          double tau, Rng& rng) {
    SceneProfile prof;
    for (int ax = 0; ax < dim; ++ax) {
        prof.position[ax] = position[ax];
        prof.base_sizes[ax] = rng.uniform(size_min, size_max);
    }
    prof.initial_position = prof.position;
    prof.weight = 1.0;

    prof.size_osc = make_oscillator(std::vector<double>(dim, 1.0), std::vector<double>(dim, 1.0),
                                    tau);
    const int angles = dim == 2 ? 1 : 3;
    std::vector<double> eq(angles);
    for (int a = 0; a < angles; ++a) eq[a] = rng.uniform(0.0, kPi);
    prof.angle_osc = make_oscillator(eq, eq, tau);
    return prof;
}

}  // namespace

Scene init_scene(const Dims& dims, AnimalMask mask, const SceneParams& params, Rng& rng) {
    const int dim = ndim(dims);
    if (mask.dims != dims) throw std::invalid_argument("init_scene: mask/dims mismatch");
    if (params.particles < 1) throw std::invalid_argument("init_scene: need at least 1 particle");

    Scene scene;
    scene.dims = dims;
    scene.mask = std::move(mask);
    scene.tau = params.tau;
    scene.size_force_std = calibrate_force_std(params.size_std_target, params.tau, 1.0);
    scene.angle_force_std = calibrate_force_std(params.angle_std_target, params.tau, 1.0);

    const PointArray particle_pos = sample_positions(scene.mask, params.particles,
                                                     params.min_dist, rng, params.max_attempts);
    scene.particles.reserve(params.particles);
    for (std::size_t i = 0; i < particle_pos.size(); ++i)
        scene.particles.push_back(make_profile(particle_pos[i], dim, params.particle_size_min,
                                               params.particle_size_max, params.tau, rng));

    const double cell_volume = std::pow(params.background_cell, dim);
    const std::size_t blobs = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(scene.mask.true_count() / cell_volume)));
    const PointArray blob_pos = sample_positions(scene.mask, blobs, 0.0, rng, params.max_attempts);
    scene.background.reserve(blobs);
    for (std::size_t i = 0; i < blob_pos.size(); ++i)
        scene.background.push_back(make_profile(blob_pos[i], dim, params.background_size_min,
                                                params.background_size_max, params.tau, rng));
    return scene;
}

Eigen::MatrixXd covariance_of(std::span<const double> sizes, std::span<const double> angles) {
    const int dim = static_cast<int>(sizes.size());
    for (double s : sizes)
        if (!(s > 0.0)) throw std::invalid_argument("covariance_of: sizes must be positive");

    Eigen::MatrixXd rot;
    if (dim == 2) {
        if (angles.size() != 1) throw std::invalid_argument("covariance_of: 2D needs one angle");
        const double c = std::cos(angles[0]), s = std::sin(angles[0]);
        rot = Eigen::Matrix2d{{c, -s}, {s, c}};
    } else if (dim == 3) {
        if (angles.size() != 3) throw std::invalid_argument("covariance_of: 3D needs three angles");
        const double cx = std::cos(angles[0]), sx = std::sin(angles[0]);
        const double cy = std::cos(angles[1]), sy = std::sin(angles[1]);
        const double cz = std::cos(angles[2]), sz = std::sin(angles[2]);
        Eigen::Matrix3d rx{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}};
        Eigen::Matrix3d ry{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}};
        Eigen::Matrix3d rz{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}};
        rot = rz * ry * rx;
    } else {
        throw std::invalid_argument("covariance_of: sizes must be 2D or 3D");
    }

    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(dim, dim);
    for (int ax = 0; ax < dim; ++ax) diag(ax, ax) = sizes[ax] * sizes[ax];
    return rot.transpose() * diag * rot;
}

namespace {

void step_one_profile(SceneProfile& prof, double dt, double size_force_std,
                      double angle_force_std, Rng& rng) {
    std::vector<double> force(prof.size_osc.value.size());
    for (double& f : force) f = size_force_std * rng.normal();
    oscillator_step(prof.size_osc, force, dt);
    for (double& s : prof.size_osc.value) s = std::max(s, 0.1);

    force.assign(prof.angle_osc.value.size(), 0.0);
    for (double& f : force) f = angle_force_std * rng.normal();
    oscillator_step(prof.angle_osc, force, dt);
}

}  // namespace

void step_profile_dynamics(Scene& scene, double dt, Rng& rng) {
    for (SceneProfile& p : scene.particles)
        step_one_profile(p, dt, scene.size_force_std, scene.angle_force_std, rng);
    for (SceneProfile& p : scene.background)
        step_one_profile(p, dt, scene.size_force_std, scene.angle_force_std, rng);
}

void advance_profiles(Scene& scene, const TpsWarp& warp) {
    const int dim = scene.dim();
    if (warp.source_points.dim != dim)
        throw std::invalid_argument("advance_profiles: warp dimensionality mismatch");
    for (SceneProfile& p : scene.particles)
        apply_tps(warp, p.initial_position.data(), p.position.data());
    for (SceneProfile& p : scene.background)
        apply_tps(warp, p.initial_position.data(), p.position.data());
}

void advance_profiles(Scene& scene, const FlowField& flow) {
    if (flow.dim() != scene.dim())
        throw std::invalid_argument("advance_profiles: flow dimensionality mismatch");
    for (SceneProfile& p : scene.particles) advect_with_flow_inplace(flow, p.position.data());
    for (SceneProfile& p : scene.background) advect_with_flow_inplace(flow, p.position.data());
}

void step_scene(Scene& scene, const TpsWarp& warp, double dt, Rng& rng) {
    advance_profiles(scene, warp);
    step_profile_dynamics(scene, dt, rng);
}

void step_scene(Scene& scene, const FlowField& flow, double dt, Rng& rng) {
    advance_profiles(scene, flow);
    step_profile_dynamics(scene, dt, rng);
}

}  // namespace spotsim
