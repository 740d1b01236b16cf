#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "spotsim/grid.hpp"
#include "spotsim/scene.hpp"

namespace spotsim {

inline constexpr std::string_view kVersion = "0.1.0";

enum class MotionType { springs, flow };
enum class MaskSource { ellipse, file };

struct SpringsConfig {
    double a_max = 4.0;     // peak random-force amplitude, pixels/frame^2
    double spacing = 32.0;  // control-lattice pitch, pixels
    double p_event = 0.25;  // per-frame probability of starting a force event
    std::int64_t event_duration = 3;
    int event_max_points = 10;  // m
};

struct MaskConfig {
    MaskSource source = MaskSource::ellipse;
    double coverage = 0.3;
    std::string path;        // stack sidecar for source = file
    double threshold = 0.0;  // gray level for source = file
};

struct RenderConfig {
    double truncation = 4.0;
    bool write_pgm = false;  // additionally write portable graymaps (2D only)
};

/// Complete description of one simulation run. Every field is overridable
/// from a config file; the manifest written next to the outputs echoes the
/// resolved values in the same format.
struct SimulationConfig {
    Dims dims{1024, 1024};
    std::int64_t frames = 200;
    double alpha = 0.2;
    double delta = 50.0;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    MotionType motion = MotionType::springs;
    SpringsConfig springs;
    std::string flow_path;  // SINFLO1 file for motion = flow

    MaskConfig mask;
    SceneParams scene;  // particles, min_dist, tau, size ranges, targets
    RenderConfig render;
};

/// Scenario presets: springs-2d, springs-3d, hydra-flow.
SimulationConfig preset(std::string_view name);

/// Applies a flat sectioned key = value file on top of `config`. Unknown
/// sections or keys are errors (reported with line numbers).
void apply_config_file(SimulationConfig& config, const std::string& path);
void apply_config_text(SimulationConfig& config, std::string_view text,
                       const std::string& origin);

/// Canonical text form: parse(render(c)) == c, used for manifests and hashing.
std::string config_to_text(const SimulationConfig& config);
std::uint64_t config_hash(const SimulationConfig& config);

void validate(const SimulationConfig& config);

}  // namespace spotsim
