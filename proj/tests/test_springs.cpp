#include <doctest.h>

#include <cmath>
#include <vector>

#include "spotsim/dynamics.hpp"
#include "spotsim/springs.hpp"

using namespace spotsim;

namespace {

AnimalMask full_mask(Dims dims) {
    AnimalMask m;
    m.dims = std::move(dims);
    m.grid.assign(voxel_count(m.dims), 1);
    return m;
}

// Two points on the x-axis at the given separation, one spring between them.
ControlGrid two_point_grid(double separation, double eq_length, double stiffness) {
    ControlGrid g;
    g.tau = 10.0;
    g.positions = PointArray(2, 2);
    g.positions[1][0] = separation;
    g.velocities = PointArray(2, 2);
    g.initial_positions = g.positions;
    g.neighbors = {{1}, {0}};
    g.stiffness = {{stiffness}, {stiffness}};
    g.eq_length = {{eq_length}, {eq_length}};
    return g;
}

}  // namespace

TEST_SUITE_BEGIN("springs");

TEST_CASE("full 100x100 mask at spacing 25 gives a 5x5 lattice") {
    const ControlGrid grid = build_control_grid(full_mask({100, 100}), 25.0, 10.0);
    CHECK(grid.size() == 25);

    int with_eight = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(grid.neighbors[i].size() >= 3);
        CHECK(grid.neighbors[i].size() <= 8);
        if (grid.neighbors[i].size() == 8) ++with_eight;
    }
    CHECK(with_eight == 9);  // the 3x3 interior

    const double k = critical_params(10.0).k;
    const double root2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t s = 0; s < grid.neighbors[i].size(); ++s) {
            CHECK(grid.stiffness[i][s] == k);
            const double le = grid.eq_length[i][s];
            const bool axis = std::abs(le - 25.0) < 1e-12;
            const bool diag = std::abs(le - 25.0 * root2) < 1e-12;
            CHECK((axis || diag));
        }
    }
}

TEST_CASE("adjacency is symmetric with identical spring parameters") {
    const ControlGrid grid = build_control_grid(full_mask({90, 60}), 17.0, 10.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t s = 0; s < grid.neighbors[i].size(); ++s) {
            const auto j = static_cast<std::size_t>(grid.neighbors[i][s]);
            bool found = false;
            for (std::size_t r = 0; r < grid.neighbors[j].size(); ++r) {
                if (static_cast<std::size_t>(grid.neighbors[j][r]) != i) continue;
                found = true;
                CHECK(grid.stiffness[j][r] == grid.stiffness[i][s]);
                CHECK(grid.eq_length[j][r] == grid.eq_length[i][s]);
            }
            CHECK(found);
        }
    }
}

TEST_CASE("single-voxel mask gives one point and no springs") {
    AnimalMask m;
    m.dims = {50, 50};
    m.grid.assign(voxel_count(m.dims), 0);
    const int c[2] = {10, 10};
    m.grid[voxel_index(m.dims, c)] = 1;
    const ControlGrid grid = build_control_grid(m, 25.0, 10.0);
    CHECK(grid.size() == 1);
    CHECK(grid.neighbors[0].empty());
}

TEST_CASE("3D interior nodes have 26 springs") {
    const ControlGrid grid = build_control_grid(full_mask({40, 40, 40}), 10.0, 10.0);
    CHECK(grid.size() == 125);
    int with_26 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.neighbors[i].size() == 26) ++with_26;
    CHECK(with_26 == 27);
}

TEST_CASE("grid construction rejects bad inputs") {
    AnimalMask empty;
    empty.dims = {32, 32};
    empty.grid.assign(voxel_count(empty.dims), 0);
    CHECK_THROWS(build_control_grid(empty, 8.0, 10.0));
    CHECK_THROWS(build_control_grid(full_mask({32, 32}), 1.0, 10.0));   // spacing < 2
    CHECK_THROWS(build_control_grid(full_mask({32, 32}), 64.0, 10.0)); // spacing > extent
}

TEST_CASE("spring force is zero at the initial geometry") {
    ControlGrid grid = build_control_grid(full_mask({100, 100}), 25.0, 10.0);
    double f[2];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        spring_force(grid, i, f);
        CHECK(f[0] == 0.0);
        CHECK(f[1] == 0.0);
    }
}

TEST_CASE("stretched pair pulls together with magnitude k * delta") {
    const double k = 0.25, delta = 0.7, eq = 10.0;
    ControlGrid grid = two_point_grid(eq + delta, eq, k);
    double f0[2], f1[2];
    spring_force(grid, 0, f0);
    spring_force(grid, 1, f1);
    CHECK(f0[0] == doctest::Approx(k * delta).epsilon(1e-12));   // toward +x neighbor
    CHECK(f1[0] == doctest::Approx(-k * delta).epsilon(1e-12));  // toward -x neighbor
    CHECK(f0[1] == doctest::Approx(0.0));
    CHECK(std::abs(f0[0] + f1[0]) < 1e-15);  // Newton's third law
}

TEST_CASE("coincident connected points are an error") {
    ControlGrid grid = two_point_grid(0.0, 10.0, 0.01);
    double f[2];
    CHECK_THROWS(spring_force(grid, 0, f));
}

TEST_CASE("internal spring forces sum to zero on a perturbed lattice") {
    ControlGrid grid = build_control_grid(full_mask({100, 100}), 20.0, 10.0);
    Rng rng(derive_stream(3, "test", 0));
    for (double& v : grid.positions.data) v += rng.uniform(-4.0, 4.0);
    double total[2] = {0, 0}, f[2];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        spring_force(grid, i, f);
        total[0] += f[0];
        total[1] += f[1];
    }
    CHECK(std::abs(total[0]) < 1e-10);
    CHECK(std::abs(total[1]) < 1e-10);
}

TEST_CASE("sampled events respect the documented distributions") {
    const ControlGrid grid = build_control_grid(full_mask({100, 100}), 20.0, 10.0);
    Rng rng(derive_stream(4, "test", 0));
    const double a_max = 4.0;
    bool saw_contraction = false, saw_elongation = false;
    for (int trial = 0; trial < 300; ++trial) {
        const ForceEvent ev = sample_force_event(rng, grid, a_max, 10, 3, trial);
        CHECK(ev.subset.size() >= 2);
        CHECK(ev.subset.size() <= 10);
        CHECK(ev.amplitudes.size() == ev.subset.size());
        for (const double a : ev.amplitudes) {
            CHECK(a >= 0.5 * a_max);
            CHECK(a <= a_max);
        }
        std::vector<char> seen(grid.size(), 0);
        for (const std::int32_t i : ev.subset) {
            CHECK(!seen[static_cast<std::size_t>(i)]);  // without replacement
            seen[static_cast<std::size_t>(i)] = 1;
        }
        saw_contraction = saw_contraction || ev.direction == -1;
        saw_elongation = saw_elongation || ev.direction == 1;
        CHECK(ev.active_at(trial));
        CHECK(ev.active_at(trial + 2));
        CHECK(!ev.active_at(trial + 3));
    }
    CHECK(saw_contraction);
    CHECK(saw_elongation);
}

TEST_CASE("event forces vanish off the subset and contract toward the barycenter") {
    const ControlGrid grid = build_control_grid(full_mask({100, 100}), 20.0, 10.0);
    Rng rng(derive_stream(5, "test", 0));
    ForceEvent ev = sample_force_event(rng, grid, 4.0, 6, 3, 0);
    ev.direction = -1;
    const PointArray forces = event_forces(grid, std::vector<ForceEvent>{ev});

    double bary[2] = {0, 0};
    for (const std::int32_t i : ev.subset)
        for (int ax = 0; ax < 2; ++ax) bary[ax] += grid.positions[static_cast<std::size_t>(i)][ax];
    for (double& b : bary) b /= static_cast<double>(ev.subset.size());

    std::vector<char> in_subset(grid.size(), 0);
    for (const std::int32_t i : ev.subset) in_subset[static_cast<std::size_t>(i)] = 1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!in_subset[i]) {
            CHECK(forces[i][0] == 0.0);
            CHECK(forces[i][1] == 0.0);
            continue;
        }
        const double dot = forces[i][0] * (grid.positions[i][0] - bary[0]) +
                           forces[i][1] * (grid.positions[i][1] - bary[1]);
        CHECK(dot < 0.0);
    }
}

TEST_CASE("equilibrium grid is a fixed point of the step") {
    ControlGrid grid = build_control_grid(full_mask({100, 100}), 25.0, 10.0);
    const PointArray before = grid.positions;
    step_spring_system(grid, {}, 1.0);
    CHECK(grid.positions.data == before.data);
    CHECK(kinetic_energy(grid) == 0.0);
}

TEST_CASE("a contraction event moves the selected points toward their barycenter") {
    ControlGrid grid = build_control_grid(full_mask({100, 100}), 25.0, 10.0);
    ForceEvent ev;
    ev.subset = {0, 4};  // two corner-ish points on the same row
    ev.amplitudes = {2.0, 2.0};
    ev.direction = -1;
    ev.start_frame = 0;
    ev.duration = 3;

    const double gap_before = distance(grid.positions[0], grid.positions[4], 2);
    for (int t = 0; t < 3; ++t)
        step_spring_system(grid, std::vector<ForceEvent>{ev}, 1.0);
    const double gap_after = distance(grid.positions[0], grid.positions[4], 2);
    CHECK(gap_after < gap_before);
}

TEST_CASE("kinetic energy relaxes below 1% of its post-event peak within 5 tau") {
    const double tau = 10.0;
    ControlGrid grid = build_control_grid(full_mask({100, 100}), 20.0, tau);
    Rng rng(derive_stream(6, "test", 0));
    const ForceEvent ev = sample_force_event(rng, grid, 4.0, 8, 3, 0);

    double peak = 0.0;
    for (int t = 0; t < 3; ++t) {
        std::vector<ForceEvent> active;
        if (ev.active_at(t)) active.push_back(ev);
        step_spring_system(grid, active, 1.0);
        peak = std::max(peak, kinetic_energy(grid));
    }
    REQUIRE(peak > 0.0);
    for (int t = 3; t < 3 + static_cast<int>(5 * tau); ++t) step_spring_system(grid, {}, 1.0);
    CHECK(kinetic_energy(grid) < 0.01 * peak);
}

TEST_CASE("event sampling preconditions") {
    const ControlGrid grid = build_control_grid(full_mask({100, 100}), 25.0, 10.0);
    Rng rng(derive_stream(8, "test", 0));
    CHECK_THROWS(sample_force_event(rng, grid, 0.0, 10, 3, 0));
    CHECK_THROWS(sample_force_event(rng, grid, 4.0, 1, 3, 0));

    ControlGrid single = two_point_grid(10.0, 10.0, 0.01);
    single.positions = PointArray(1, 2);
    single.velocities = PointArray(1, 2);
    single.initial_positions = single.positions;
    single.neighbors = {{}};
    single.stiffness = {{}};
    single.eq_length = {{}};
    CHECK_THROWS(sample_force_event(rng, single, 4.0, 10, 3, 0));
}

TEST_SUITE_END();
