#pragma once

#include <vector>

#include "spotsim/grid.hpp"

namespace spotsim {

/// Scalar voxel grid. Intensities are normalized: 1.0 is nominal full scale.
struct ImageBuffer {
    Dims dims;
    std::vector<double> data;

    ImageBuffer() = default;
    explicit ImageBuffer(Dims d) : dims(std::move(d)), data(voxel_count(dims), 0.0) {}

    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }
};

}  // namespace spotsim
