#include "spotsim/springs.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>

#include "spotsim/dynamics.hpp"

namespace spotsim {

ControlGrid build_control_grid(const AnimalMask& mask, double spacing, double tau) {
    const int dim = ndim(mask.dims);
    if (dim < 2 || dim > 3) throw std::invalid_argument("build_control_grid: dims must be 2D or 3D");
    if (!(spacing >= 2.0)) throw std::invalid_argument("build_control_grid: spacing must be >= 2");
    if (mask.true_count() == 0) throw std::invalid_argument("build_control_grid: empty mask");
    int max_extent = 0;
    for (int s : mask.dims) max_extent = std::max(max_extent, s);
    if (spacing > static_cast<double>(max_extent))
        throw std::invalid_argument("build_control_grid: spacing exceeds mask extent");
    critical_params(tau);

    // Lattice node l has coordinates l * spacing; node counts cover the domain.
    int nodes_per_axis[3] = {1, 1, 1};
    for (int ax = 0; ax < dim; ++ax)
        nodes_per_axis[ax] = static_cast<int>(std::floor(mask.dims[ax] / spacing)) + 1;

    const auto node_id = [&](const int* l) {
        std::int64_t id = 0;
        for (int ax = dim - 1; ax >= 0; --ax) id = id * nodes_per_axis[ax] + l[ax];
        return id;
    };

    // A node is kept when some mask voxel center falls in its half-spacing
    // cell, i.e. the node is the voxel's nearest lattice point.
    std::vector<std::uint8_t> keep(voxel_count(
        Dims(nodes_per_axis, nodes_per_axis + dim)), 0);
    const std::size_t voxels = voxel_count(mask.dims);
    int coord[3] = {0, 0, 0};
    for (std::size_t v = 0; v < voxels; ++v) {
        if (!mask.grid[v]) continue;
        voxel_coord(mask.dims, v, coord);
        int l[3] = {0, 0, 0};
        for (int ax = 0; ax < dim; ++ax) {
            const double center = coord[ax] + 0.5;
            l[ax] = std::clamp(static_cast<int>(std::lround(center / spacing)), 0,
                               nodes_per_axis[ax] - 1);
        }
        keep[static_cast<std::size_t>(node_id(l))] = 1;
    }

    // Dense re-index of kept nodes.
    std::map<std::int64_t, std::int32_t> index_of;
    std::vector<std::array<int, 3>> lattice;
    {
        int l[3] = {0, 0, 0};
        const int nz = dim == 3 ? nodes_per_axis[2] : 1;
        for (l[2] = 0; l[2] < nz; ++l[2])
            for (l[1] = 0; l[1] < nodes_per_axis[1]; ++l[1])
                for (l[0] = 0; l[0] < nodes_per_axis[0]; ++l[0]) {
                    if (!keep[static_cast<std::size_t>(node_id(l))]) continue;
                    index_of[node_id(l)] = static_cast<std::int32_t>(lattice.size());
                    lattice.push_back({l[0], l[1], l[2]});
                }
    }

    const std::size_t n = lattice.size();
    ControlGrid grid;
    grid.tau = tau;
    grid.positions = PointArray(n, dim);
    grid.velocities = PointArray(n, dim);
    grid.neighbors.resize(n);
    grid.stiffness.resize(n);
    grid.eq_length.resize(n);

    const double k = critical_params(tau).k;
    for (std::size_t i = 0; i < n; ++i)
        for (int ax = 0; ax < dim; ++ax) grid.positions[i][ax] = lattice[i][ax] * spacing;
    grid.initial_positions = grid.positions;

    // Springs to all lattice offsets with |di| <= 1 per axis: 8 neighbors in
    // 2D, 26 in 3D.
    for (std::size_t i = 0; i < n; ++i) {
        int off[3];
        const int zlo = dim == 3 ? -1 : 0, zhi = dim == 3 ? 1 : 0;
        for (off[2] = zlo; off[2] <= zhi; ++off[2])
            for (off[1] = -1; off[1] <= 1; ++off[1])
                for (off[0] = -1; off[0] <= 1; ++off[0]) {
                    if (off[0] == 0 && off[1] == 0 && off[2] == 0) continue;
                    int l[3] = {lattice[i][0] + off[0], lattice[i][1] + off[1],
                                lattice[i][2] + off[2]};
                    bool inside = true;
                    for (int ax = 0; ax < dim; ++ax)
                        inside = inside && l[ax] >= 0 && l[ax] < nodes_per_axis[ax];
                    if (!inside) continue;
                    const auto it = index_of.find(node_id(l));
                    if (it == index_of.end()) continue;
                    const std::int32_t j = it->second;
                    grid.neighbors[i].push_back(j);
                    grid.stiffness[i].push_back(k);
                    grid.eq_length[i].push_back(
                        distance(grid.initial_positions[i],
                                 grid.initial_positions[static_cast<std::size_t>(j)], dim));
                }
    }
    return grid;
}

void spring_force(const ControlGrid& grid, std::size_t i, double* out) {
    const int dim = grid.dim();
    for (int ax = 0; ax < dim; ++ax) out[ax] = 0.0;
    const double* pi = grid.positions[i];
    for (std::size_t s = 0; s < grid.neighbors[i].size(); ++s) {
        const double* pj = grid.positions[static_cast<std::size_t>(grid.neighbors[i][s])];
        const double len = distance(pi, pj, dim);
        if (len <= 0.0)
            throw std::runtime_error("spring_force: connected control points are coincident");
        const double scale = -grid.stiffness[i][s] * (len - grid.eq_length[i][s]) / len;
        for (int ax = 0; ax < dim; ++ax) out[ax] += scale * (pi[ax] - pj[ax]);
    }
}

ForceEvent sample_force_event(Rng& rng, const ControlGrid& grid, double a_max, int m,
                              std::int64_t duration, std::int64_t frame) {
    const std::size_t n = grid.size();
    if (n < 2) throw std::invalid_argument("sample_force_event: need at least 2 control points");
    if (m < 2) throw std::invalid_argument("sample_force_event: m must be >= 2");
    if (!(a_max > 0.0)) throw std::invalid_argument("sample_force_event: a_max must be positive");
    if (duration < 1) throw std::invalid_argument("sample_force_event: duration must be >= 1");

    const std::uint64_t hi = std::min<std::uint64_t>(static_cast<std::uint64_t>(m), n);
    const std::uint64_t count = 2 + rng.uniform_int(hi - 1);  // uniform on {2..hi}

    // Partial Fisher-Yates for a uniform subset without replacement.
    std::vector<std::int32_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::int32_t>(i);
    ForceEvent ev;
    ev.subset.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t j = i + rng.uniform_int(n - i);
        std::swap(pool[i], pool[j]);
        ev.subset.push_back(pool[i]);
    }
    ev.direction = rng.uniform_int(2) == 0 ? -1 : 1;
    ev.amplitudes.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i)
        ev.amplitudes.push_back(rng.uniform(0.5 * a_max, a_max));
    ev.start_frame = frame;
    ev.duration = duration;
    return ev;
}

PointArray event_forces(const ControlGrid& grid, std::span<const ForceEvent> events) {
    const int dim = grid.dim();
    PointArray forces(grid.size(), dim);
    for (const ForceEvent& ev : events) {
        double bary[3] = {0, 0, 0};
        for (const std::int32_t i : ev.subset)
            for (int ax = 0; ax < dim; ++ax)
                bary[ax] += grid.positions[static_cast<std::size_t>(i)][ax];
        for (int ax = 0; ax < dim; ++ax) bary[ax] /= static_cast<double>(ev.subset.size());

        for (std::size_t s = 0; s < ev.subset.size(); ++s) {
            const std::size_t i = static_cast<std::size_t>(ev.subset[s]);
            const double* p = grid.positions[i];
            const double len = distance(p, bary, dim);
            if (len <= 1e-12) continue;  // point sitting on the barycenter: no direction
            const double scale = ev.direction * ev.amplitudes[s] / len;
            for (int ax = 0; ax < dim; ++ax) forces[i][ax] += scale * (p[ax] - bary[ax]);
        }
    }
    return forces;
}

void step_spring_system(ControlGrid& grid, std::span<const ForceEvent> active_events, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_spring_system: dt must be positive");
    const int dim = grid.dim();
    const std::size_t n = grid.size();
    const double lambda = critical_params(grid.tau).lambda;

    PointArray forces = event_forces(grid, active_events);
    double fs[3];
    for (std::size_t i = 0; i < n; ++i) {
        spring_force(grid, i, fs);
        for (int ax = 0; ax < dim; ++ax) forces[i][ax] += fs[ax];
    }
    // Synchronous update: all accelerations above used the pre-step positions.
    for (std::size_t i = 0; i < n; ++i) {
        for (int ax = 0; ax < dim; ++ax) {
            const double accel = forces[i][ax] - lambda * grid.velocities[i][ax];
            grid.velocities[i][ax] += dt * accel;
            grid.positions[i][ax] += dt * grid.velocities[i][ax];
        }
    }
}

double kinetic_energy(const ControlGrid& grid) {
    double e = 0.0;
    for (double v : grid.velocities.data) e += 0.5 * v * v;
    return e;
}

}  // namespace spotsim
