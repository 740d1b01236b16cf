#pragma once

#include <Eigen/Dense>

#include "spotsim/grid.hpp"

namespace spotsim {

/// Thin-plate-spline displacement interpolant. Kernel U(r) = r^2 log r in 2D
/// and U(r) = r in 3D. The fitted map sends each source point to its target
/// exactly when regularization is 0; kernel weights satisfy the usual side
/// conditions (zero constant and linear moments over the source points).
///
/// The system is solved in centered, unit-scaled source coordinates; the
/// interpolant is equivariant under that similarity, so the resulting map is
/// unchanged while the linear system stays well conditioned on pixel-sized
/// domains. Evaluation normalizes query points with the stored offset/scale.
struct TpsWarp {
    PointArray source_points;        // n x d, normalized coordinates
    Eigen::MatrixXd kernel_weights;  // n x d
    Eigen::MatrixXd affine;          // (d+1) x d: rows 0..d-1 linear map, row d translation
    double regularization = 0.0;
    double offset[3] = {0.0, 0.0, 0.0};  // query normalization: (p - offset) / scale
    double scale = 1.0;
};

double tps_kernel(double r, int dim);

/// Factorizes the TPS system once for a fixed source configuration so
/// per-frame refits against moving targets are a back-substitution.
class TpsSolver {
public:
    TpsSolver(PointArray source, double regularization);

    TpsWarp solve(const PointArray& target) const;

    const PointArray& source() const { return source_; }

private:
    PointArray source_;
    PointArray normalized_;
    double regularization_;
    double offset_[3] = {0.0, 0.0, 0.0};
    double scale_ = 1.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

TpsWarp fit_tps(const PointArray& source, const PointArray& target, double regularization);

void apply_tps(const TpsWarp& warp, const double* point, double* out);
PointArray apply_tps(const TpsWarp& warp, const PointArray& points);

}  // namespace spotsim
