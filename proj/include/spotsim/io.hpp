#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spotsim/eval.hpp"
#include "spotsim/grid.hpp"
#include "spotsim/image.hpp"

namespace spotsim {

/// One exported ground-truth record: a live particle in one frame.
struct TrackRow {
    std::int64_t frame = 0;
    std::int64_t track_id = 0;
    std::array<double, 3> position{};
    double weight = 1.0;
    std::array<double, 3> sizes{};
    std::array<double, 3> angles{};  // 1 used in 2D, 3 in 3D
};

/// Track CSV: header frame,track_id,x,y[,z],weight,sx,sy[,sz],theta[,...],
/// one row per (frame, live particle), frames ascending, ids ascending
/// within a frame, positions with 6 fractional digits.
void write_tracks_csv(const std::filesystem::path& path, int dim, std::span<const TrackRow> rows);

/// Reads the positional part of a track CSV (both the full ground-truth
/// format above and a minimal frame,track_id,x,y[,z] file).
TrackSet read_track_set(const std::filesystem::path& path);

/// Writes a bare TrackSet (predictions) in the minimal column format.
void write_track_set_csv(const std::filesystem::path& path, const TrackSet& tracks);

void write_raw_u16(const std::filesystem::path& path, std::span<const std::uint16_t> data);
std::vector<std::uint16_t> read_raw_u16(const std::filesystem::path& path,
                                        std::size_t expected_values);

/// Sidecar describing a raw image stack (one little-endian u16 file per frame).
struct StackMeta {
    Dims dims;
    std::int64_t frames = 0;
    int bit_depth = 16;
    std::string frame_pattern = "frame_%04d.raw";  // relative to the sidecar
};

void write_stack_meta(const std::filesystem::path& path, const StackMeta& meta);
StackMeta read_stack_meta(const std::filesystem::path& path);

std::filesystem::path stack_frame_path(const std::filesystem::path& meta_path,
                                       const StackMeta& meta, std::int64_t frame);

/// Frame of a raw stack as a scalar image with the stored gray levels.
ImageBuffer read_stack_frame(const std::filesystem::path& meta_path, const StackMeta& meta,
                             std::int64_t frame);

/// 16-bit binary PGM (P5, big-endian samples per the format).
void write_pgm16(const std::filesystem::path& path, const Dims& dims,
                 std::span<const std::uint16_t> data);

}  // namespace spotsim
