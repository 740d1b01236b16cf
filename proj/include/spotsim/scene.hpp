#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spotsim/dynamics.hpp"
#include "spotsim/flow.hpp"
#include "spotsim/image.hpp"
#include "spotsim/mask.hpp"
#include "spotsim/rng.hpp"
#include "spotsim/tps.hpp"

namespace spotsim {

struct Ellipse {
    std::array<double, 3> center{};
    std::array<double, 3> semi_axes{};
    int dim = 2;
};

/// Axis-aligned ellipse/ellipsoid fitting entirely inside the domain whose
/// rasterized coverage is within +-10% relative of the request.
Ellipse sample_ellipse(const Dims& dims, double coverage, Rng& rng);
AnimalMask rasterize_ellipse(const Ellipse& ellipse, const Dims& dims);
AnimalMask sample_ellipse_mask(const Dims& dims, double coverage, Rng& rng);

/// Threshold segmentation: mask = (image >= threshold). Errors when empty.
AnimalMask load_mask(const ImageBuffer& image, double threshold);

/// Uniform positions over mask voxels with sub-voxel jitter, dart-thrown so
/// all pairwise distances are >= min_dist. Throws after max_attempts failed
/// draws for any single point, reporting how many were placed.
PointArray sample_positions(const AnimalMask& mask, std::size_t count, double min_dist, Rng& rng,
                            int max_attempts = 64);

/// One rendered Gaussian profile (tracked particle or background blob).
/// Current sizes are size_osc.value (normalized, eq 1) times base_sizes;
/// angles live in angle_osc (1 angle in 2D, 3 in 3D).
struct SceneProfile {
    std::array<double, 3> position{};
    std::array<double, 3> initial_position{};
    double weight = 1.0;
    std::array<double, 3> base_sizes{1.0, 1.0, 1.0};
    OscillatorState size_osc;
    OscillatorState angle_osc;

    std::array<double, 3> current_sizes(int dim) const {
        std::array<double, 3> s{1.0, 1.0, 1.0};
        for (int ax = 0; ax < dim; ++ax) s[ax] = size_osc.value[ax] * base_sizes[ax];
        return s;
    }
};

struct SceneParams {
    std::size_t particles = 800;
    double min_dist = 6.0;
    double tau = 10.0;
    double particle_size_min = 1.0;
    double particle_size_max = 3.0;
    double background_size_min = 20.0;
    double background_size_max = 60.0;
    /// One background blob per background_cell^d of mask volume (at least 1).
    double background_cell = 40.0;
    double size_std_target = 0.05;
    double angle_std_target = 0.10471975511965977;  // pi/30 rad
    int max_attempts = 64;
};

struct Scene {
    Dims dims;
    AnimalMask mask;
    std::vector<SceneProfile> particles;
    std::vector<SceneProfile> background;
    double size_force_std = 0.0;
    double angle_force_std = 0.0;
    double tau = 10.0;

    int dim() const { return ndim(dims); }
};

Scene init_scene(const Dims& dims, AnimalMask mask, const SceneParams& params, Rng& rng);

/// Sigma = R^T diag(sizes)^2 R for the given rotation angles (one angle in
/// 2D; R = Rz(az) Ry(ay) Rx(ax) in 3D). Symmetric positive-definite.
Eigen::MatrixXd covariance_of(std::span<const double> sizes, std::span<const double> angles);

/// Steps every profile's size and angle oscillators once with freshly drawn
/// calibrated random forces. Normalized sizes are floored at 0.1 to keep the
/// covariance positive-definite.
void step_profile_dynamics(Scene& scene, double dt, Rng& rng);

/// Position updates: a TPS warp is evaluated on the stored initial positions
/// (refit-from-initial contract); a flow field advects current positions.
void advance_profiles(Scene& scene, const TpsWarp& warp);
void advance_profiles(Scene& scene, const FlowField& flow);

/// One full scene step: deformation, then shape dynamics.
void step_scene(Scene& scene, const TpsWarp& warp, double dt, Rng& rng);
void step_scene(Scene& scene, const FlowField& flow, double dt, Rng& rng);

}  // namespace spotsim
