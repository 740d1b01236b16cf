#include "spotsim/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spotsim/rng.hpp"

namespace spotsim {

ImageBuffer render_profiles(const std::vector<SceneProfile>& profiles, const Dims& dims,
                            double truncation) {
    const int dim = ndim(dims);
    if (dim < 2 || dim > 3) throw std::invalid_argument("render_profiles: dims must be 2D or 3D");
    if (!(truncation >= 3.0)) throw std::invalid_argument("render_profiles: truncation must be >= 3");

    ImageBuffer img(dims);
    // Contributions with quadratic form above this are below 1e-26 and are
    // treated as zero, like everything outside the truncation box.
    constexpr double kQuadCut = 120.0;

    for (const SceneProfile& prof : profiles) {
        const auto sizes = prof.current_sizes(dim);
        double max_sigma = 0.0;
        for (int ax = 0; ax < dim; ++ax) max_sigma = std::max(max_sigma, sizes[ax]);

        const Eigen::MatrixXd cov = covariance_of(
            std::span<const double>(sizes.data(), static_cast<std::size_t>(dim)),
            std::span<const double>(prof.angle_osc.value.data(), prof.angle_osc.value.size()));
        // covariance_of guarantees SPD for positive sizes.
        const Eigen::MatrixXd inv = cov.inverse();
        double m[3][3] = {};
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) m[r][c] = inv(r, c);

        int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        bool empty = false;
        const double radius = truncation * max_sigma;
        for (int ax = 0; ax < dim; ++ax) {
            lo[ax] = std::max(0, static_cast<int>(std::ceil(prof.position[ax] - radius)));
            hi[ax] = std::min(dims[ax] - 1, static_cast<int>(std::floor(prof.position[ax] + radius)));
            empty = empty || lo[ax] > hi[ax];
        }
        if (empty) continue;

        // Along each row, q(x) = a ux^2 + 2 b ux + c in ux = x - px. The
        // exponent advances by two additions per voxel, and only the segment
        // with q <= kQuadCut is evaluated.
        const double a = m[0][0];
        int z[3] = {lo[0], lo[1], lo[2]};
        const int zlo = dim == 3 ? lo[2] : 0, zhi = dim == 3 ? hi[2] : 0;
        for (z[2] = zlo; z[2] <= zhi; ++z[2]) {
            const double uz = dim == 3 ? z[2] - prof.position[2] : 0.0;
            for (z[1] = lo[1]; z[1] <= hi[1]; ++z[1]) {
                const double uy = z[1] - prof.position[1];
                const double b = m[0][1] * uy + m[0][2] * uz;
                const double c =
                    m[1][1] * uy * uy + 2.0 * m[1][2] * uy * uz + m[2][2] * uz * uz;
                const double disc = b * b - a * (c - kQuadCut);
                if (disc < 0.0) continue;  // whole row below the cut
                const double half_width = std::sqrt(disc) / a;
                const double center = prof.position[0] - b / a;
                const int x_lo = std::max(lo[0], static_cast<int>(std::ceil(center - half_width)));
                const int x_hi = std::min(hi[0], static_cast<int>(std::floor(center + half_width)));
                if (x_lo > x_hi) continue;

                z[0] = x_lo;
                std::size_t row = voxel_index(dims, z);
                const double ux = x_lo - prof.position[0];
                double q = (a * ux + 2.0 * b) * ux + c;
                double dq = a * (2.0 * ux + 1.0) + 2.0 * b;
                const double ddq = 2.0 * a;
                for (int x = x_lo; x <= x_hi; ++x, ++row) {
                    img.data[row] += prof.weight * std::exp(-0.5 * q);
                    q += dq;
                    dq += ddq;
                }
            }
        }
    }
    return img;
}

double background_gain(const ImageBuffer& first_background) {
    if (first_background.data.empty())
        throw std::invalid_argument("background_gain: empty buffer");
    const double gain = *std::max_element(first_background.data.begin(),
                                          first_background.data.end());
    if (!(gain > 0.0)) throw std::runtime_error("background_gain: background image is all zero");
    return gain;
}

ImageBuffer mix(const ImageBuffer& particle_img, const ImageBuffer& background_img,
                const NoiseParams& params) {
    if (particle_img.dims != background_img.dims)
        throw std::invalid_argument("mix: image dimensions differ");
    if (!(params.alpha > 0.0) || params.alpha > 1.0)
        throw std::invalid_argument("mix: alpha must be in (0, 1]");
    if (!(params.gain > 0.0)) throw std::invalid_argument("mix: gain must be positive");

    ImageBuffer out(particle_img.dims);
    const double bg_scale = (1.0 - params.alpha) / params.gain;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = params.alpha * particle_img.data[i] + bg_scale * background_img.data[i];
    return out;
}

ImageBuffer shot_noise(const ImageBuffer& image, double delta, std::uint64_t noise_stream) {
    if (!(delta > 0.0)) throw std::invalid_argument("shot_noise: delta must be positive");
    ImageBuffer out(image.dims);
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        const double mean = delta * image.data[i];
        if (mean < 0.0) throw std::invalid_argument("shot_noise: negative input intensity");
        Rng voxel_rng(hash_u64(noise_stream, i));
        out.data[i] = static_cast<double>(voxel_rng.poisson(mean)) / delta;
    }
    return out;
}

std::vector<std::uint16_t> quantize_u16(const ImageBuffer& image) {
    std::vector<std::uint16_t> out(image.data.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = std::clamp(image.data[i], 0.0, 1.0);
        out[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
    }
    return out;
}

}  // namespace spotsim
