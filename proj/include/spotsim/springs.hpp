#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spotsim/grid.hpp"
#include "spotsim/mask.hpp"
#include "spotsim/rng.hpp"

namespace spotsim {

/// Spring-connected control-point lattice driving the tissue deformation.
/// Adjacency is symmetric; stiffness and eq_length are stored per neighbor
/// slot, parallel to `neighbors`. Non-neighbor pairs have no spring.
struct ControlGrid {
    PointArray positions;          // n x d, current
    PointArray velocities;         // n x d, pixels/frame
    PointArray initial_positions;  // n x d, lattice geometry at t = 0
    std::vector<std::vector<std::int32_t>> neighbors;
    std::vector<std::vector<double>> stiffness;  // 1/frame^2
    std::vector<std::vector<double>> eq_length;  // pixels
    double tau = 10.0;

    std::size_t size() const { return positions.size(); }
    int dim() const { return positions.dim; }
};

/// Regular axis-aligned lattice at pitch `spacing` restricted to nodes whose
/// half-spacing cell contains at least one mask voxel. Springs connect the 8
/// (2D) / 26 (3D) lattice neighbors; all stiffnesses are 1/tau^2 and
/// equilibrium lengths come from the initial geometry.
ControlGrid build_control_grid(const AnimalMask& mask, double spacing, double tau);

/// Net spring force on point i (sum over its neighbors). Throws if a
/// connected pair is coincident.
void spring_force(const ControlGrid& grid, std::size_t i, double* out);

/// Transient contraction/elongation force applied to a point subset.
/// Amplitudes are fixed at sampling time; the direction toward/away from the
/// subset barycenter follows the current positions.
struct ForceEvent {
    std::vector<std::int32_t> subset;
    std::vector<double> amplitudes;  // parallel to subset, pixels/frame^2
    int direction = -1;              // -1 contraction, +1 elongation
    std::int64_t start_frame = 0;
    std::int64_t duration = 1;

    bool active_at(std::int64_t frame) const {
        return frame >= start_frame && frame < start_frame + duration;
    }
};

/// |subset| uniform on {2..min(m, n)}, subset uniform without replacement,
/// direction uniform on {-1, +1}, amplitudes i.i.d. uniform on [a_max/2, a_max].
ForceEvent sample_force_event(Rng& rng, const ControlGrid& grid, double a_max, int m,
                              std::int64_t duration, std::int64_t frame);

/// Per-point sum of the given events' forces at the grid's current positions.
PointArray event_forces(const ControlGrid& grid, std::span<const ForceEvent> events);

/// One synchronous semi-implicit Euler step of the n-body system. All forces
/// are evaluated at the current positions, then velocity and position update
/// in that order. Every event in `active_events` is applied.
void step_spring_system(ControlGrid& grid, std::span<const ForceEvent> active_events, double dt);

/// Total kinetic energy 0.5 * sum |v_i|^2 (unit masses).
double kinetic_energy(const ControlGrid& grid);

}  // namespace spotsim
