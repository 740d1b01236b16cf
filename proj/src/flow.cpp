#include "spotsim/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace spotsim {

namespace {

constexpr char kMagic[7] = {'S', 'I', 'N', 'F', 'L', 'O', '1'};

// This codebase only targets little-endian hosts; raw f32/u32 copies below
// rely on it.
std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                                static_cast<unsigned char>((v >> 8) & 0xFF),
                                static_cast<unsigned char>((v >> 16) & 0xFF),
                                static_cast<unsigned char>((v >> 24) & 0xFF)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

void sample_flow(const FlowField& flow, const double* point, double* out) {
    const int dim = flow.dim();
    // Clamped base corner and interpolation weights.
    int base[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int ax = 0; ax < dim; ++ax) {
        const double p = std::clamp(point[ax], 0.0, static_cast<double>(flow.dims[ax] - 1));
        base[ax] = std::min(static_cast<int>(std::floor(p)), std::max(flow.dims[ax] - 2, 0));
        frac[ax] = p - base[ax];
    }
    for (int c = 0; c < dim; ++c) out[c] = 0.0;

    const int corners = 1 << dim;
    for (int corner = 0; corner < corners; ++corner) {
        double w = 1.0;
        int coord[3] = {0, 0, 0};
        for (int ax = 0; ax < dim; ++ax) {
            const int hi = (corner >> ax) & 1;
            coord[ax] = std::min(base[ax] + hi, flow.dims[ax] - 1);
            w *= hi ? frac[ax] : 1.0 - frac[ax];
        }
        if (w == 0.0) continue;
        const std::size_t v = voxel_index(flow.dims, coord) * static_cast<std::size_t>(dim);
        for (int c = 0; c < dim; ++c) out[c] += w * static_cast<double>(flow.displacement[v + c]);
    }
}

void advect_with_flow_inplace(const FlowField& flow, double* point) {
    double disp[3];
    sample_flow(flow, point, disp);
    for (int ax = 0; ax < flow.dim(); ++ax) point[ax] += disp[ax];
}

PointArray advect_with_flow(const FlowField& flow, const PointArray& points) {
    if (points.dim != flow.dim())
        throw std::invalid_argument("advect_with_flow: dimensionality mismatch");
    PointArray out = points;
    for (std::size_t i = 0; i < out.size(); ++i) advect_with_flow_inplace(flow, out[i]);
    return out;
}

FlowSequence::FlowSequence(const std::filesystem::path& path) : path_(path) {
    stream_.open(path, std::ios::binary);
    if (!stream_) throw std::runtime_error("cannot open flow file: " + path.string());
    char magic[7];
    stream_.read(magic, 7);
    if (!stream_ || std::memcmp(magic, kMagic, 7) != 0)
        throw std::runtime_error("not a SINFLO1 flow file: " + path.string());
    unsigned char d = 0;
    stream_.read(reinterpret_cast<char*>(&d), 1);
    if (d != 2 && d != 3)
        throw std::runtime_error("flow file has unsupported dimensionality: " + path.string());
    dims_.resize(d);
    for (int ax = 0; ax < d; ++ax) {
        dims_[ax] = static_cast<int>(read_u32(stream_));
        if (dims_[ax] <= 0) throw std::runtime_error("flow file has empty grid axis");
    }
    frames_ = static_cast<std::int64_t>(read_u32(stream_));
    if (!stream_) throw std::runtime_error("truncated flow header: " + path.string());
    header_bytes_ = 7 + 1 + 4ULL * d + 4;
    frame_bytes_ = static_cast<std::uint64_t>(voxel_count(dims_)) * d * 4;
}

FlowField FlowSequence::read_frame(std::int64_t t) const {
    if (t < 0 || t >= frames_)
        throw std::out_of_range("flow frame index out of range: " + std::to_string(t));
    FlowField field;
    field.dims = dims_;
    field.displacement.resize(frame_bytes_ / 4);
    stream_.clear();
    stream_.seekg(static_cast<std::streamoff>(header_bytes_ + frame_bytes_ * static_cast<std::uint64_t>(t)));
    stream_.read(reinterpret_cast<char*>(field.displacement.data()),
                 static_cast<std::streamsize>(frame_bytes_));
    if (!stream_) throw std::runtime_error("truncated flow file: " + path_.string());
    return field;
}

void write_flow_file(const std::filesystem::path& path, const Dims& dims,
                     const std::vector<FlowField>& frames) {
    const int dim = ndim(dims);
    if (dim != 2 && dim != 3) throw std::invalid_argument("write_flow_file: dims must be 2D or 3D");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create flow file: " + path.string());
    out.write(kMagic, 7);
    const unsigned char d = static_cast<unsigned char>(dim);
    out.write(reinterpret_cast<const char*>(&d), 1);
    for (int ax = 0; ax < dim; ++ax) write_u32(out, static_cast<std::uint32_t>(dims[ax]));
    write_u32(out, static_cast<std::uint32_t>(frames.size()));
    const std::size_t expected = voxel_count(dims) * static_cast<std::size_t>(dim);
    for (const FlowField& f : frames) {
        if (f.dims != dims || f.displacement.size() != expected)
            throw std::invalid_argument("write_flow_file: frame shape mismatch");
        out.write(reinterpret_cast<const char*>(f.displacement.data()),
                  static_cast<std::streamsize>(expected * 4));
    }
    if (!out) throw std::runtime_error("flow file write failed: " + path.string());
}

FlowField contraction_flow_frame(const Dims& dims, std::int64_t t, std::int64_t frames,
                                 double strength) {
    const int dim = ndim(dims);
    FlowField field;
    field.dims = dims;
    field.displacement.resize(voxel_count(dims) * static_cast<std::size_t>(dim));

    double center[3] = {0, 0, 0};
    double corner_dist_sq = 0.0;
    for (int ax = 0; ax < dim; ++ax) {
        center[ax] = 0.5 * (dims[ax] - 1);
        corner_dist_sq += center[ax] * center[ax];
    }
    const double corner_dist = std::max(std::sqrt(corner_dist_sq), 1.0);
    const double ramp = std::pow(std::sin(M_PI * (t + 0.5) / static_cast<double>(frames)), 2.0);
    const double scale = -strength * ramp / corner_dist;

    const std::size_t voxels = voxel_count(dims);
    int coord[3] = {0, 0, 0};
    for (std::size_t v = 0; v < voxels; ++v) {
        voxel_coord(dims, v, coord);
        for (int ax = 0; ax < dim; ++ax)
            field.displacement[v * dim + ax] =
                static_cast<float>(scale * (coord[ax] - center[ax]));
    }
    return field;
}

void write_contraction_flow(const std::filesystem::path& path, const Dims& dims,
                            std::int64_t frames, double strength) {
    if (frames < 1) throw std::invalid_argument("write_contraction_flow: frames must be >= 1");
    std::vector<FlowField> fields;
    fields.reserve(static_cast<std::size_t>(frames));
    for (std::int64_t t = 0; t < frames; ++t)
        fields.push_back(contraction_flow_frame(dims, t, frames, strength));
    write_flow_file(path, dims, fields);
}

}  // namespace spotsim
