#include "spotsim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spotsim {

namespace {

void append_field(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    out += buf;
}

}  // namespace

void write_tracks_csv(const std::filesystem::path& path, int dim, std::span<const TrackRow> rows) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("write_tracks_csv: dim must be 2 or 3");
    std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
    if (!out) throw std::runtime_error("cannot create track file: " + path.string());

    out << (dim == 2 ? "frame,track_id,x,y,weight,sx,sy,theta\n"
                     : "frame,track_id,x,y,z,weight,sx,sy,sz,theta_x,theta_y,theta_z\n");
    const int angles = dim == 2 ? 1 : 3;
    std::string line;
    for (const TrackRow& r : rows) {
        line.clear();
        line += std::to_string(r.frame);
        line += ',';
        line += std::to_string(r.track_id);
        for (int ax = 0; ax < dim; ++ax) {
            line += ',';
            append_field(line, r.position[ax]);
        }
        line += ',';
        append_field(line, r.weight);
        for (int ax = 0; ax < dim; ++ax) {
            line += ',';
            append_field(line, r.sizes[ax]);
        }
        for (int a = 0; a < angles; ++a) {
            line += ',';
            append_field(line, r.angles[a]);
        }
        line += '\n';
        out << line;
    }
    if (!out) throw std::runtime_error("track file write failed: " + path.string());
}

TrackSet read_track_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open track file: " + path.string());

    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error(path.string() + ":1: empty track file");
    while (!header.empty() && (header.back() == '\r' || header.back() == '\n')) header.pop_back();

    int dim = 0;
    if (header.rfind("frame,track_id,x,y,z", 0) == 0) dim = 3;
    else if (header.rfind("frame,track_id,x,y", 0) == 0) dim = 2;
    else
        throw std::runtime_error(path.string() + ":1: unrecognized track header '" + header + "'");

    TrackSet set;
    set.dim = dim;
    std::string line;
    std::int64_t line_no = 1;
    std::int64_t max_frame = -1;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);

        std::array<double, 5> fields{};  // frame, id, x, y[, z]
        const char* p = line.c_str();
        for (int f = 0; f < 2 + dim; ++f) {
            char* end = nullptr;
            fields[static_cast<std::size_t>(f)] = std::strtod(p, &end);
            if (end == p) throw std::runtime_error(where + ": malformed numeric field");
            p = end;
            if (*p == ',') ++p;
            else if (f < 1 + dim)
                throw std::runtime_error(where + ": expected at least " + std::to_string(2 + dim) +
                                         " comma-separated fields");
        }
        const std::int64_t frame = static_cast<std::int64_t>(fields[0]);
        const std::int64_t id = static_cast<std::int64_t>(fields[1]);
        if (frame < 0) throw std::runtime_error(where + ": negative frame index");
        std::array<double, 3> pos{0, 0, 0};
        for (int ax = 0; ax < dim; ++ax) pos[ax] = fields[static_cast<std::size_t>(2 + ax)];
        const auto [it, inserted] = set.tracks[id].emplace(frame, pos);
        (void)it;
        if (!inserted)
            throw std::runtime_error(where + ": duplicate (frame, track_id) entry");
        max_frame = std::max(max_frame, frame);
    }
    set.frame_count = max_frame + 1;
    return set;
}

void write_track_set_csv(const std::filesystem::path& path, const TrackSet& tracks) {
    if (tracks.dim != 2 && tracks.dim != 3)
        throw std::invalid_argument("write_track_set_csv: dim must be 2 or 3");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create track file: " + path.string());
    out << (tracks.dim == 2 ? "frame,track_id,x,y\n" : "frame,track_id,x,y,z\n");

    // Same row ordering as the ground-truth format: frames ascending, ids
    // ascending within a frame.
    std::string line;
    for (std::int64_t t = 0; t < tracks.frame_count; ++t) {
        for (const auto& [id, traj] : tracks.tracks) {
            const auto it = traj.find(t);
            if (it == traj.end()) continue;
            line.clear();
            line += std::to_string(t);
            line += ',';
            line += std::to_string(id);
            for (int ax = 0; ax < tracks.dim; ++ax) {
                line += ',';
                append_field(line, it->second[static_cast<std::size_t>(ax)]);
            }
            line += '\n';
            out << line;
        }
    }
    if (!out) throw std::runtime_error("track file write failed: " + path.string());
}

void write_raw_u16(const std::filesystem::path& path, std::span<const std::uint16_t> data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create raw file: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * 2));
    if (!out) throw std::runtime_error("raw file write failed: " + path.string());
}

std::vector<std::uint16_t> read_raw_u16(const std::filesystem::path& path,
                                        std::size_t expected_values) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open raw file: " + path.string());
    std::vector<std::uint16_t> data(expected_values);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(expected_values * 2));
    if (in.gcount() != static_cast<std::streamsize>(expected_values * 2))
        throw std::runtime_error("raw file shorter than expected: " + path.string());
    return data;
}

void write_stack_meta(const std::filesystem::path& path, const StackMeta& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create sidecar: " + path.string());
    out << "format raw-u16-le\n";
    out << "dims";
    for (int d : meta.dims) out << " " << d;
    out << "\n";
    out << "frames " << meta.frames << "\n";
    out << "bit_depth " << meta.bit_depth << "\n";
    out << "frame_pattern " << meta.frame_pattern << "\n";
    if (!out) throw std::runtime_error("sidecar write failed: " + path.string());
}

StackMeta read_stack_meta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sidecar: " + path.string());
    StackMeta meta;
    meta.dims.clear();
    std::string line;
    bool format_seen = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key.empty() || key[0] == '#') continue;
        if (key == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "raw-u16-le")
                throw std::runtime_error(path.string() + ": unsupported stack format " + fmt);
            format_seen = true;
        } else if (key == "dims") {
            int d = 0;
            while (ls >> d) meta.dims.push_back(d);
        } else if (key == "frames") {
            ls >> meta.frames;
        } else if (key == "bit_depth") {
            ls >> meta.bit_depth;
        } else if (key == "frame_pattern") {
            ls >> meta.frame_pattern;
        } else {
            throw std::runtime_error(path.string() + ": unknown sidecar key " + key);
        }
    }
    if (!format_seen || meta.dims.empty() || meta.frames < 1)
        throw std::runtime_error(path.string() + ": incomplete sidecar");
    return meta;
}

std::filesystem::path stack_frame_path(const std::filesystem::path& meta_path,
                                       const StackMeta& meta, std::int64_t frame) {
    // Only a single integer conversion is allowed in the pattern.
    const std::string& pat = meta.frame_pattern;
    const std::size_t pct = pat.find('%');
    if (pct == std::string::npos || pat.find('%', pct + 1) != std::string::npos ||
        pat.find_first_of("diu", pct) == std::string::npos)
        throw std::runtime_error("invalid frame_pattern: " + pat);
    char name[256];
    std::snprintf(name, sizeof name, pat.c_str(), static_cast<int>(frame));
    return meta_path.parent_path() / name;
}

ImageBuffer read_stack_frame(const std::filesystem::path& meta_path, const StackMeta& meta,
                             std::int64_t frame) {
    if (frame < 0 || frame >= meta.frames)
        throw std::out_of_range("stack frame out of range: " + std::to_string(frame));
    const auto data = read_raw_u16(stack_frame_path(meta_path, meta, frame), voxel_count(meta.dims));
    ImageBuffer img(meta.dims);
    for (std::size_t i = 0; i < data.size(); ++i) img.data[i] = static_cast<double>(data[i]);
    return img;
}

void write_pgm16(const std::filesystem::path& path, const Dims& dims,
                 std::span<const std::uint16_t> data) {
    if (ndim(dims) != 2) throw std::invalid_argument("write_pgm16: PGM output is 2D only");
    if (data.size() != voxel_count(dims)) throw std::invalid_argument("write_pgm16: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create pgm: " + path.string());
    out << "P5\n" << dims[0] << " " << dims[1] << "\n65535\n";
    std::vector<unsigned char> bytes(data.size() * 2);
    for (std::size_t i = 0; i < data.size(); ++i) {
        bytes[2 * i] = static_cast<unsigned char>(data[i] >> 8);  // big-endian samples
        bytes[2 * i + 1] = static_cast<unsigned char>(data[i] & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("pgm write failed: " + path.string());
}

}  // namespace spotsim
