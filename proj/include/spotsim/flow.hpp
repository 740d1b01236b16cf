#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "spotsim/grid.hpp"

namespace spotsim {

/// Dense per-frame displacement grid, pixels per frame. Values live at
/// integer grid coordinates; storage is voxel-major with the d components of
/// each voxel contiguous (x, y[, z]).
struct FlowField {
    Dims dims;
    std::vector<float> displacement;  // voxel_count * d

    int dim() const { return ndim(dims); }
};

/// Multilinearly interpolated displacement at a continuous position.
/// Out-of-domain positions are clamped to the boundary before sampling.
void sample_flow(const FlowField& flow, const double* point, double* out);

/// Moves each point by the flow displacement sampled at its position.
PointArray advect_with_flow(const FlowField& flow, const PointArray& points);
void advect_with_flow_inplace(const FlowField& flow, double* point);

/// Reader for the "SINFLO1" flow container: 7-byte magic, u8 dimensionality,
/// d little-endian u32 grid sizes (x first), u32 frame count, then
/// frames * voxels * d little-endian f32 displacements, frame-major,
/// voxel-minor, component-last.
class FlowSequence {
public:
    explicit FlowSequence(const std::filesystem::path& path);

    const Dims& dims() const { return dims_; }
    std::int64_t frame_count() const { return frames_; }

    FlowField read_frame(std::int64_t t) const;

private:
    Dims dims_;
    std::int64_t frames_ = 0;
    std::filesystem::path path_;
    mutable std::ifstream stream_;
    std::uint64_t frame_bytes_ = 0;
    std::uint64_t header_bytes_ = 0;
};

void write_flow_file(const std::filesystem::path& path, const Dims& dims,
                     const std::vector<FlowField>& frames);

/// Synthetic flow for exercising flow-driven runs without experimental data:
/// a global contraction toward the domain center whose strength ramps
/// smoothly (sin^2) over the sequence. `strength` is the peak displacement in
/// pixels/frame at the domain boundary.
FlowField contraction_flow_frame(const Dims& dims, std::int64_t t, std::int64_t frames,
                                 double strength);
void write_contraction_flow(const std::filesystem::path& path, const Dims& dims,
                            std::int64_t frames, double strength);

}  // namespace spotsim
