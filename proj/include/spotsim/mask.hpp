#pragma once

#include <cstdint>
#include <vector>

#include "spotsim/grid.hpp"

namespace spotsim {

/// Boolean occupancy grid for the simulated body. Voxel i covers the
/// half-open cube [i, i+1) in continuous coordinates.
struct AnimalMask {
    Dims dims;
    std::vector<std::uint8_t> grid;  // 0 or 1, voxel_count(dims) entries

    bool contains(const double* p) const {
        int c[3] = {0, 0, 0};
        for (int ax = 0; ax < ndim(dims); ++ax) {
            c[ax] = static_cast<int>(std::floor(p[ax]));
            if (c[ax] < 0 || c[ax] >= dims[ax]) return false;
        }
        return grid[voxel_index(dims, c)] != 0;
    }

    std::size_t true_count() const {
        std::size_t n = 0;
        for (std::uint8_t v : grid) n += v;
        return n;
    }
};

}  // namespace spotsim
