#pragma once

#include <filesystem>

#include "spotsim/config.hpp"
#include "spotsim/eval.hpp"
#include "spotsim/io.hpp"

namespace spotsim {

struct GenerateOptions {
    /// Image rendering/writing can be skipped for track-only studies; the
    /// ground truth is unaffected because every module draws from its own
    /// derived random stream.
    bool write_images = true;
};

struct GenerateResult {
    std::filesystem::path out_dir;
    std::filesystem::path tracks_path;
    std::filesystem::path meta_path;
    std::filesystem::path manifest_path;
    double background_gain = 0.0;
};

/// Runs the full generate pipeline: mask, scene init, per-frame motion +
/// shape dynamics, rendering, shot noise, quantization and export. One seed
/// yields byte-identical outputs.
GenerateResult generate(const SimulationConfig& config, const GenerateOptions& options = {});

/// Scores a predicted track file against a ground-truth track file.
HotaScores evaluate_files(const std::filesystem::path& gt_path,
                          const std::filesystem::path& pred_path, double eta);

}  // namespace spotsim
