#include "spotsim/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

#include "spotsim/flow.hpp"
#include "spotsim/render.hpp"
#include "spotsim/rng.hpp"
#include "spotsim/scene.hpp"
#include "spotsim/springs.hpp"
#include "spotsim/tps.hpp"

namespace spotsim {

namespace {

AnimalMask build_mask(const SimulationConfig& config) {
    if (config.mask.source == MaskSource::ellipse) {
        Rng rng(derive_stream(config.seed, "mask", 0));
        return sample_ellipse_mask(config.dims, config.mask.coverage, rng);
    }
    const StackMeta meta = read_stack_meta(config.mask.path);
    if (meta.dims != config.dims)
        throw std::runtime_error("mask stack dims do not match the configured dims");
    const ImageBuffer img = read_stack_frame(config.mask.path, meta, 0);
    return load_mask(img, config.mask.threshold);
}

void append_frame_rows(std::vector<TrackRow>& rows, const Scene& scene, std::int64_t frame) {
    const int dim = scene.dim();
    const int angles = dim == 2 ? 1 : 3;
    for (std::size_t i = 0; i < scene.particles.size(); ++i) {
        const SceneProfile& p = scene.particles[i];
        TrackRow row;
        row.frame = frame;
        row.track_id = static_cast<std::int64_t>(i);
        row.weight = p.weight;
        const auto sizes = p.current_sizes(dim);
        for (int ax = 0; ax < dim; ++ax) {
            row.position[ax] = p.position[ax];
            row.sizes[ax] = sizes[ax];
        }
        for (int a = 0; a < angles; ++a) row.angles[a] = p.angle_osc.value[static_cast<std::size_t>(a)];
        rows.push_back(row);
    }
}

// Motion state for the springs scenario: the TPS source configuration is the
// initial lattice, so the system factorization is reused across frames.
struct SpringsMotion {
    ControlGrid grid;
    TpsSolver solver;
    std::vector<ForceEvent> events;

    SpringsMotion(const AnimalMask& mask, const SpringsConfig& cfg, double tau)
        : grid(build_control_grid(mask, cfg.spacing, tau)), solver(grid.initial_positions, 0.0) {}
};

}  // namespace

GenerateResult generate(const SimulationConfig& config, const GenerateOptions& options) {
    validate(config);
    const int dim = ndim(config.dims);
    namespace fs = std::filesystem;

    GenerateResult result;
    result.out_dir = config.out_dir;
    fs::create_directories(result.out_dir);

    AnimalMask mask = build_mask(config);

    Rng scene_rng(derive_stream(config.seed, "scene-init", 0));
    Scene scene = init_scene(config.dims, std::move(mask), config.scene, scene_rng);

    // Motion backends, only needed when there is a frame transition to make.
    // Flow files carry one displacement field per transition, so frames-1
    // fields are required.
    std::unique_ptr<SpringsMotion> springs;
    std::unique_ptr<FlowSequence> flow;
    if (config.frames > 1 && config.motion == MotionType::springs) {
        springs = std::make_unique<SpringsMotion>(scene.mask, config.springs, config.scene.tau);
        if (springs->grid.size() < 2)
            throw std::runtime_error(
                "control grid has fewer than 2 points; decrease motion.spacing");
    } else if (config.frames > 1) {
        flow = std::make_unique<FlowSequence>(config.flow_path);
        if (flow->dims() != config.dims)
            throw std::runtime_error("flow grid dims do not match the configured dims");
        if (flow->frame_count() < config.frames - 1)
            throw std::runtime_error("flow file has fewer than frames-1 displacement fields");
    }

    NoiseParams noise;
    noise.alpha = config.alpha;
    noise.delta = config.delta;

    StackMeta meta;
    meta.dims = config.dims;
    meta.frames = config.frames;
    result.meta_path = result.out_dir / "stack.meta";

    std::vector<TrackRow> rows;
    rows.reserve(static_cast<std::size_t>(config.frames) * scene.particles.size());

    for (std::int64_t t = 0; t < config.frames; ++t) {
        // Ground truth reflects exactly the state being rendered.
        append_frame_rows(rows, scene, t);

        if (options.write_images) {
            const ImageBuffer particle_img =
                render_profiles(scene.particles, config.dims, config.render.truncation);
            const ImageBuffer background_img =
                render_profiles(scene.background, config.dims, config.render.truncation);
            if (t == 0) {
                noise.gain = background_gain(background_img);
                result.background_gain = noise.gain;
            }
            const ImageBuffer mixed = mix(particle_img, background_img, noise);
            const ImageBuffer noisy = shot_noise(
                mixed, config.delta, derive_stream(config.seed, "noise", static_cast<std::uint64_t>(t)));
            const auto pixels = quantize_u16(noisy);

            char name[64];
            std::snprintf(name, sizeof name, "frame_%04d.raw", static_cast<int>(t));
            write_raw_u16(result.out_dir / name, pixels);
            if (config.render.write_pgm && dim == 2) {
                std::snprintf(name, sizeof name, "frame_%04d.pgm", static_cast<int>(t));
                write_pgm16(result.out_dir / name, config.dims, pixels);
            }
        }

        if (t + 1 >= config.frames) break;

        // Advance motion to the next frame, then shape dynamics.
        Rng dyn_rng(derive_stream(config.seed, "scene", static_cast<std::uint64_t>(t)));
        if (springs) {
            Rng motion_rng(derive_stream(config.seed, "motion", static_cast<std::uint64_t>(t)));
            if (motion_rng.uniform01() < config.springs.p_event)
                springs->events.push_back(sample_force_event(
                    motion_rng, springs->grid, config.springs.a_max, config.springs.event_max_points,
                    config.springs.event_duration, t));
            std::vector<ForceEvent> active;
            for (const ForceEvent& ev : springs->events)
                if (ev.active_at(t)) active.push_back(ev);
            std::erase_if(springs->events,
                          [&](const ForceEvent& ev) { return ev.start_frame + ev.duration <= t; });
            step_spring_system(springs->grid, active, 1.0);
            step_scene(scene, springs->solver.solve(springs->grid.positions), 1.0, dyn_rng);
        } else {
            step_scene(scene, flow->read_frame(t), 1.0, dyn_rng);
        }
    }

    result.tracks_path = result.out_dir / "tracks.csv";
    write_tracks_csv(result.tracks_path, dim, rows);
    if (options.write_images) write_stack_meta(result.meta_path, meta);

    result.manifest_path = result.out_dir / "manifest.txt";
    {
        std::ofstream out(result.manifest_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot create manifest");
        out << "# spotsim run manifest; the body below is a loadable config\n";
        out << "# version = " << kVersion << "\n";
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(config_hash(config)));
        out << "# config_hash = " << hash << "\n";
        out << config_to_text(config);
        if (!out) throw std::runtime_error("manifest write failed");
    }
    return result;
}

HotaScores evaluate_files(const std::filesystem::path& gt_path,
                          const std::filesystem::path& pred_path, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("evaluate: eta must be positive");
    const TrackSet gt = read_track_set(gt_path);
    const TrackSet pred = read_track_set(pred_path);
    return hota(gt, pred, eta);
}

}  // namespace spotsim
