#include "spotsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "spotsim/rng.hpp"

namespace spotsim {

SimulationConfig preset(std::string_view name) {
    SimulationConfig c;  // defaults already match the 2D springs scenario
    if (name == "springs-2d") {
        c.motion = MotionType::springs;
        c.springs.a_max = 4.0;
        c.springs.spacing = 32.0;
    } else if (name == "springs-3d") {
        c.dims = {200, 200, 200};
        c.motion = MotionType::springs;
        c.springs.a_max = 3.0;
        c.springs.spacing = 16.0;
        c.scene.min_dist = 4.0;
    } else if (name == "hydra-flow") {
        c.motion = MotionType::flow;  // requires a flow_path before generate
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) +
                                    "' (available: hydra-flow, springs-2d, springs-3d)");
    }
    return c;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string_view::npos ? std::string() : std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& v, const std::string& where) {
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw std::runtime_error(where + ": trailing junk in number '" + v + "'");
    return out;
}

std::int64_t parse_int(const std::string& v, const std::string& where) {
    const double d = parse_double(v, where);
    if (d != std::floor(d)) throw std::runtime_error(where + ": expected an integer, got '" + v + "'");
    return static_cast<std::int64_t>(d);
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error(where + ": expected true/false, got '" + v + "'");
}

Dims parse_dims(const std::string& v, const std::string& where) {
    std::istringstream in(v);
    Dims dims;
    int x = 0;
    while (in >> x) dims.push_back(x);
    if (!in.eof() || dims.size() < 2 || dims.size() > 3)
        throw std::runtime_error(where + ": dims must be 2 or 3 positive integers, got '" + v + "'");
    return dims;
}

std::string format_double(double v) {
    // Shortest round-trip representation keeps manifests diff-friendly.
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

using Setter = std::function<void(SimulationConfig&, const std::string&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"simulation",
         {
             {"dims", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.dims = parse_dims(v, w); }},
             {"frames", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.frames = parse_int(v, w); }},
             {"particles", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.particles = static_cast<std::size_t>(parse_int(v, w)); }},
             {"alpha", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.alpha = parse_double(v, w); }},
             {"delta", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.delta = parse_double(v, w); }},
             {"tau", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.tau = parse_double(v, w); }},
             {"min_dist", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.min_dist = parse_double(v, w); }},
             {"seed", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.seed = static_cast<std::uint64_t>(parse_int(v, w)); }},
         }},
        {"motion",
         {
             {"type",
              [](SimulationConfig& c, const std::string& v, const std::string& w) {
                  if (v == "springs") c.motion = MotionType::springs;
                  else if (v == "flow") c.motion = MotionType::flow;
                  else throw std::runtime_error(w + ": motion type must be springs or flow");
              }},
             {"a_max", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.springs.a_max = parse_double(v, w); }},
             {"spacing", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.springs.spacing = parse_double(v, w); }},
             {"p_event", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.springs.p_event = parse_double(v, w); }},
             {"event_duration", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.springs.event_duration = parse_int(v, w); }},
             {"event_max_points", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.springs.event_max_points = static_cast<int>(parse_int(v, w)); }},
             {"flow_path", [](SimulationConfig& c, const std::string& v, const std::string&) { c.flow_path = v; }},
         }},
        {"mask",
         {
             {"source",
              [](SimulationConfig& c, const std::string& v, const std::string& w) {
                  if (v == "ellipse") c.mask.source = MaskSource::ellipse;
                  else if (v == "file") c.mask.source = MaskSource::file;
                  else throw std::runtime_error(w + ": mask source must be ellipse or file");
              }},
             {"coverage", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.mask.coverage = parse_double(v, w); }},
             {"path", [](SimulationConfig& c, const std::string& v, const std::string&) { c.mask.path = v; }},
             {"threshold", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.mask.threshold = parse_double(v, w); }},
         }},
        {"scene",
         {
             {"particle_size_min", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.particle_size_min = parse_double(v, w); }},
             {"particle_size_max", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.particle_size_max = parse_double(v, w); }},
             {"background_size_min", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.background_size_min = parse_double(v, w); }},
             {"background_size_max", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.background_size_max = parse_double(v, w); }},
             {"background_cell", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.background_cell = parse_double(v, w); }},
             {"size_std", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.size_std_target = parse_double(v, w); }},
             {"angle_std", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.angle_std_target = parse_double(v, w); }},
             {"max_attempts", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.scene.max_attempts = static_cast<int>(parse_int(v, w)); }},
         }},
        {"render",
         {
             {"truncation", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.render.truncation = parse_double(v, w); }},
             {"write_pgm", [](SimulationConfig& c, const std::string& v, const std::string& w) { c.render.write_pgm = parse_bool(v, w); }},
         }},
        {"output",
         {
             {"dir", [](SimulationConfig& c, const std::string& v, const std::string&) { c.out_dir = v; }},
         }},
    };
    return s;
}

}  // namespace

void apply_config_text(SimulationConfig& config, std::string_view text, const std::string& origin) {
    std::istringstream in{std::string(text)};
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw std::runtime_error(where + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!schema().count(section))
                throw std::runtime_error(where + ": unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected key = value");
        if (section.empty()) throw std::runtime_error(where + ": key outside any section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const auto& keys = schema().at(section);
        const auto it = keys.find(key);
        if (it == keys.end())
            throw std::runtime_error(where + ": unknown key '" + key + "' in section [" + section +
                                     "]");
        it->second(config, value, where);
    }
}

void apply_config_file(SimulationConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_text(config, buf.str(), path);
}

std::string config_to_text(const SimulationConfig& c) {
    std::ostringstream out;
    out << "[simulation]\n";
    out << "dims =";
    for (int d : c.dims) out << " " << d;
    out << "\n";
    out << "frames = " << c.frames << "\n";
    out << "particles = " << c.scene.particles << "\n";
    out << "alpha = " << format_double(c.alpha) << "\n";
    out << "delta = " << format_double(c.delta) << "\n";
    out << "tau = " << format_double(c.scene.tau) << "\n";
    out << "min_dist = " << format_double(c.scene.min_dist) << "\n";
    out << "seed = " << c.seed << "\n";
    out << "[motion]\n";
    out << "type = " << (c.motion == MotionType::springs ? "springs" : "flow") << "\n";
    out << "a_max = " << format_double(c.springs.a_max) << "\n";
    out << "spacing = " << format_double(c.springs.spacing) << "\n";
    out << "p_event = " << format_double(c.springs.p_event) << "\n";
    out << "event_duration = " << c.springs.event_duration << "\n";
    out << "event_max_points = " << c.springs.event_max_points << "\n";
    out << "flow_path = " << c.flow_path << "\n";
    out << "[mask]\n";
    out << "source = " << (c.mask.source == MaskSource::ellipse ? "ellipse" : "file") << "\n";
    out << "coverage = " << format_double(c.mask.coverage) << "\n";
    out << "path = " << c.mask.path << "\n";
    out << "threshold = " << format_double(c.mask.threshold) << "\n";
    out << "[scene]\n";
    out << "particle_size_min = " << format_double(c.scene.particle_size_min) << "\n";
    out << "particle_size_max = " << format_double(c.scene.particle_size_max) << "\n";
    out << "background_size_min = " << format_double(c.scene.background_size_min) << "\n";
    out << "background_size_max = " << format_double(c.scene.background_size_max) << "\n";
    out << "background_cell = " << format_double(c.scene.background_cell) << "\n";
    out << "size_std = " << format_double(c.scene.size_std_target) << "\n";
    out << "angle_std = " << format_double(c.scene.angle_std_target) << "\n";
    out << "max_attempts = " << c.scene.max_attempts << "\n";
    out << "[render]\n";
    out << "truncation = " << format_double(c.render.truncation) << "\n";
    out << "write_pgm = " << (c.render.write_pgm ? "true" : "false") << "\n";
    out << "[output]\n";
    out << "dir = " << c.out_dir << "\n";
    return out.str();
}

std::uint64_t config_hash(const SimulationConfig& c) {
    return hash_name(0x5EED5EED5EED5EEDULL, config_to_text(c));
}

void validate(const SimulationConfig& c) {
    const int dim = ndim(c.dims);
    if (dim < 2 || dim > 3) throw std::invalid_argument("config: dims must be 2D or 3D");
    for (int d : c.dims)
        if (d <= 0) throw std::invalid_argument("config: dims must be positive");
    if (c.frames < 1) throw std::invalid_argument("config: frames must be >= 1");
    if (c.scene.particles < 1) throw std::invalid_argument("config: particles must be >= 1");
    if (!(c.alpha > 0.0) || c.alpha > 1.0) throw std::invalid_argument("config: alpha must be in (0, 1]");
    if (!(c.delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
    if (!(c.scene.tau > 0.0)) throw std::invalid_argument("config: tau must be positive");
    if (!(c.scene.min_dist >= 0.0)) throw std::invalid_argument("config: min_dist must be >= 0");
    if (c.motion == MotionType::flow && c.flow_path.empty())
        throw std::invalid_argument("config: motion = flow requires motion.flow_path");
    if (c.mask.source == MaskSource::file && c.mask.path.empty())
        throw std::invalid_argument("config: mask source = file requires mask.path");
}

}  // namespace spotsim
