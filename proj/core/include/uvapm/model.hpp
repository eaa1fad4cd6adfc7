#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "uvapm/coeffs.hpp"
#include "uvapm/image.hpp"

namespace uvapm {

/// Mean + orthonormal PCA basis for one color channel, flattened row-major
/// over a square d x d grid. Values are built with 64-bit accumulation and
/// then rounded through 32-bit floats so that on-disk float payloads
/// round-trip bit-exactly.
struct AlbedoChannelBasis {
    int resolution = 0;              // d
    Eigen::VectorXd mean;            // d*d
    Eigen::MatrixXd basis;           // d*d x rank, orthonormal columns
    Eigen::VectorXd singular_values; // rank, non-increasing
    double total_variance = 0.0;     // dataset statistic, 1/(N-1) scale

    int rank() const { return static_cast<int>(basis.cols()); }
    Eigen::Index dim() const { return mean.size(); }
};

/// Per-channel PCA albedo model: three independent channel bases (R,G,B)
/// sharing one resolution and rank.
struct UVAPMModel {
    std::array<AlbedoChannelBasis, 3> channels;
    int n_samples = 0;

    int resolution() const { return channels[0].resolution; }
    int rank() const { return channels[0].rank(); }
    int coeff_count() const { return 3 * rank(); }
};

/// PCA basis over V-channel residual planes at the detail resolution.
struct DetailBasis {
    AlbedoChannelBasis channel;
    int n_samples = 0;

    int resolution() const { return channel.resolution; }
    int rank() const { return channel.rank(); }
};

// Flatten/unflatten helpers shared by the builder and the decoders.
Eigen::VectorXd plane_to_vector(const ChannelPlane& plane);
ChannelPlane vector_to_plane(const Eigen::VectorXd& v, int width, int height);

/// Builds the per-channel PCA model from N >= 2 images at one square
/// resolution. k must satisfy k <= min(N-1, d*d); if the data's numerical
/// rank is lower, the stored rank is clamped down.
UVAPMModel build_uvapm(const std::vector<UVImage>& images, int k);

/// Least-squares optimal coefficients for a d x d image under the model:
/// per channel alpha = basis^T (x - mean). Channel-major output.
CoarseCoeffs encode_coarse(const UVImage& img, const UVAPMModel& model);

/// V-channel residuals between each image (at d_detail) and the bilinearly
/// upsampled coarse reconstruction of that image. Values lie in [-1,1].
std::vector<ChannelPlane> extract_residuals(const std::vector<UVImage>& images,
                                            const UVAPMModel& model, int d_detail);

/// PCA over residual planes; same contract as build_uvapm on one channel.
DetailBasis build_detail_basis(const std::vector<ChannelPlane>& residuals, int m);

/// Projection of a residual plane onto the detail basis.
DetailCoeffs encode_detail(const ChannelPlane& residual, const DetailBasis& basis);

/// Fraction of total variance captured by the first r components.
double explained_variance(const AlbedoChannelBasis& channel, int r, int n_samples);

} // namespace uvapm
