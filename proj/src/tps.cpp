#include "spotsim/tps.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace spotsim {

double tps_kernel(double r, int dim) {
    if (dim == 2) return r > 0.0 ? r * r * std::log(r) : 0.0;
    return r;  // biharmonic fundamental solution in 3D
}

TpsSolver::TpsSolver(PointArray source, double regularization)
    : source_(std::move(source)), regularization_(regularization) {
    const int dim = source_.dim;
    const std::size_t n = source_.size();
    if (dim < 2 || dim > 3) throw std::invalid_argument("TpsSolver: points must be 2D or 3D");
    if (!(regularization >= 0.0))
        throw std::invalid_argument("TpsSolver: regularization must be non-negative");
    if (n < static_cast<std::size_t>(dim) + 1)
        throw std::invalid_argument("TpsSolver: need at least dim+1 source points");

    // Center and scale to unit RMS radius; keeps the kernel block and the
    // affine block comparable in magnitude.
    for (int ax = 0; ax < dim; ++ax) offset_[ax] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (int ax = 0; ax < dim; ++ax) offset_[ax] += source_[i][ax];
    for (int ax = 0; ax < dim; ++ax) offset_[ax] /= static_cast<double>(n);
    double rms = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (int ax = 0; ax < dim; ++ax) {
            const double d = source_[i][ax] - offset_[ax];
            rms += d * d;
        }
    scale_ = std::sqrt(rms / static_cast<double>(n));
    if (!(scale_ > 0.0)) scale_ = 1.0;  // all sources coincide; rank check below fires

    normalized_ = PointArray(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (int ax = 0; ax < dim; ++ax)
            normalized_[i][ax] = (source_[i][ax] - offset_[ax]) / scale_;

    // System [[K + reg I, P], [P^T, 0]] with P = [p_i | 1].
    const Eigen::Index m = static_cast<Eigen::Index>(n) + dim + 1;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double u = tps_kernel(distance(normalized_[i], normalized_[j], dim), dim);
            l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u;
            l(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = u;
        }
        l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = regularization_;
        for (int ax = 0; ax < dim; ++ax) {
            l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n) + ax) = normalized_[i][ax];
            l(static_cast<Eigen::Index>(n) + ax, static_cast<Eigen::Index>(i)) = normalized_[i][ax];
        }
        l(static_cast<Eigen::Index>(i), m - 1) = 1.0;
        l(m - 1, static_cast<Eigen::Index>(i)) = 1.0;
    }

    qr_.compute(l);
    if (qr_.rank() < m) {
        throw std::runtime_error(
            "TPS system is rank-deficient (rank " + std::to_string(qr_.rank()) + " of " +
            std::to_string(m) + "): source points are degenerate (collinear/coplanar)");
    }
}

TpsWarp TpsSolver::solve(const PointArray& target) const {
    const int dim = source_.dim;
    const std::size_t n = source_.size();
    if (target.dim != dim || target.size() != n)
        throw std::invalid_argument("TpsSolver::solve: target shape mismatch");

    const Eigen::Index m = static_cast<Eigen::Index>(n) + dim + 1;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (int ax = 0; ax < dim; ++ax) rhs(static_cast<Eigen::Index>(i), ax) = target[i][ax];

    const Eigen::MatrixXd sol = qr_.solve(rhs);
    TpsWarp warp;
    warp.source_points = normalized_;
    warp.kernel_weights = sol.topRows(static_cast<Eigen::Index>(n));
    warp.affine = sol.bottomRows(dim + 1);
    warp.regularization = regularization_;
    for (int ax = 0; ax < dim; ++ax) warp.offset[ax] = offset_[ax];
    warp.scale = scale_;
    return warp;
}

TpsWarp fit_tps(const PointArray& source, const PointArray& target, double regularization) {
    return TpsSolver(source, regularization).solve(target);
}

void apply_tps(const TpsWarp& warp, const double* point, double* out) {
    const int dim = warp.source_points.dim;
    const std::size_t n = warp.source_points.size();
    double q[3] = {0, 0, 0};
    for (int ax = 0; ax < dim; ++ax) q[ax] = (point[ax] - warp.offset[ax]) / warp.scale;

    for (int j = 0; j < dim; ++j) {
        double v = warp.affine(dim, j);
        for (int ax = 0; ax < dim; ++ax) v += warp.affine(ax, j) * q[ax];
        out[j] = v;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double u = tps_kernel(distance(warp.source_points[i], q, dim), dim);
        for (int j = 0; j < dim; ++j)
            out[j] += warp.kernel_weights(static_cast<Eigen::Index>(i), j) * u;
    }
}

PointArray apply_tps(const TpsWarp& warp, const PointArray& points) {
    if (points.dim != warp.source_points.dim)
        throw std::invalid_argument("apply_tps: dimensionality mismatch");
    PointArray out(points.size(), points.dim);
    for (std::size_t i = 0; i < points.size(); ++i) apply_tps(warp, points[i], out[i]);
    return out;
}

}  // namespace spotsim
