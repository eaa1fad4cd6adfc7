#pragma once

#include <filesystem>

#include <Eigen/Core>

#include "uvapm/image.hpp"

namespace uvapm {

/// Ground-truth 2D landmarks in pixel coordinates with per-point weights.
struct LandmarkSet {
    Eigen::MatrixX2d points; // 68 x 2
    Eigen::VectorXd weights; // 68, all >= 0

    /// Contour points (0-16) at 0.5, everything else at 1.
    static LandmarkSet with_default_weights(Eigen::MatrixX2d pts);
};

/// JSON array of 68 [x, y] pixel pairs; weights get the defaults.
LandmarkSet load_landmarks_json(const std::filesystem::path& path);
void save_landmarks_json(const LandmarkSet& landmarks, const std::filesystem::path& path);

/// Masked mean of the per-pixel RGB L2 norm:
///   L = sum G*W*||I - I_r||_2 / sum G
/// (or the squared norm when `squared`). The gradient w.r.t. I_r uses
/// subgradient 0 at pixels where the difference is exactly zero.
struct PhotometricResult {
    double loss = 0.0;
    UVImage render_adjoint; // dL/dI_r
};
PhotometricResult photometric_loss(const UVImage& image, const UVImage& rendered,
                                   const FaceMask& mask, bool squared = false);

/// Weighted sum of squared coordinate differences over all 68 points.
struct LandmarkLossResult {
    double loss = 0.0;
    Eigen::MatrixX2d point_adjoint; // dL/dk, 68 x 2
};
LandmarkLossResult landmark_loss(const LandmarkSet& gt, const Eigen::MatrixX2d& projected);

/// Image -> unit-norm feature vector. The identity loss treats this as a
/// black box: no gradient flows through it.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual Eigen::VectorXd embed(const UVImage& image) const = 0;
};

/// 1 - cos(F(I), F(I_r)). Report-only.
double identity_loss(const EmbeddingProvider& provider, const UVImage& image,
                     const UVImage& rendered);

} // namespace uvapm
