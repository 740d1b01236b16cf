#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace spotsim {

/// Grid dimensions in pixels, x first. Length 2 (images) or 3 (volumes).
using Dims = std::vector<int>;

inline int ndim(const Dims& dims) { return static_cast<int>(dims.size()); }

inline std::size_t voxel_count(const Dims& dims) {
    std::size_t n = 1;
    for (int s : dims) {
        if (s <= 0) throw std::invalid_argument("grid dimensions must be positive");
        n *= static_cast<std::size_t>(s);
    }
    return dims.empty() ? 0 : n;
}

/// Linear voxel index with x fastest.
inline std::size_t voxel_index(const Dims& dims, const int* coord) {
    std::size_t idx = 0;
    for (int ax = ndim(dims) - 1; ax >= 0; --ax) {
        idx = idx * static_cast<std::size_t>(dims[ax]) + static_cast<std::size_t>(coord[ax]);
    }
    return idx;
}

/// Inverse of voxel_index.
inline void voxel_coord(const Dims& dims, std::size_t idx, int* coord) {
    for (int ax = 0; ax < ndim(dims); ++ax) {
        coord[ax] = static_cast<int>(idx % static_cast<std::size_t>(dims[ax]));
        idx /= static_cast<std::size_t>(dims[ax]);
    }
}

/// Flat n x dim array of points, point-major.
struct PointArray {
    std::vector<double> data;
    int dim = 0;

    PointArray() = default;
    PointArray(std::size_t n, int d) : data(n * static_cast<std::size_t>(d), 0.0), dim(d) {}

    std::size_t size() const { return dim > 0 ? data.size() / static_cast<std::size_t>(dim) : 0; }
    double* operator[](std::size_t i) { return data.data() + i * static_cast<std::size_t>(dim); }
    const double* operator[](std::size_t i) const {
        return data.data() + i * static_cast<std::size_t>(dim);
    }
};

inline double squared_distance(const double* a, const double* b, int dim) {
    double s = 0;
    for (int ax = 0; ax < dim; ++ax) {
        const double d = a[ax] - b[ax];
        s += d * d;
    }
    return s;
}

inline double distance(const double* a, const double* b, int dim) {
    return std::sqrt(squared_distance(a, b, dim));
}

}  // namespace spotsim
