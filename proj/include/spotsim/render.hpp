#pragma once

#include <cstdint>
#include <vector>

#include "spotsim/image.hpp"
#include "spotsim/scene.hpp"

namespace spotsim {

struct NoiseParams {
    double alpha = 0.2;  // particle/background mixing proportion, (0, 1]
    double delta = 50.0; // integration time: expected photons at unit intensity
    double gain = 1.0;   // background normalization G^b, fixed at t = 0
};

/// Sum of weighted anisotropic Gaussians evaluated at integer voxel
/// coordinates. Each profile is only evaluated inside its axis-aligned box of
/// +-truncation * max(sigma); contributions outside are treated as zero.
/// Profiles accumulate in index order.
ImageBuffer render_profiles(const std::vector<SceneProfile>& profiles, const Dims& dims,
                            double truncation = 4.0);

/// Max voxel of the first noise-free background image; reused for all frames.
double background_gain(const ImageBuffer& first_background);

/// alpha * particle + (1 - alpha) / gain * background, voxelwise.
ImageBuffer mix(const ImageBuffer& particle_img, const ImageBuffer& background_img,
                const NoiseParams& params);

/// Poisson shot noise, voxelwise I = Poisson(delta * value) / delta. Each
/// voxel owns a counter-based stream derived from (noise_stream, voxel index),
/// so any evaluation order produces identical output.
ImageBuffer shot_noise(const ImageBuffer& image, double delta, std::uint64_t noise_stream);

/// 16-bit quantization with saturation at 1.0.
std::vector<std::uint16_t> quantize_u16(const ImageBuffer& image);

}  // namespace spotsim
