#pragma once

#include <Eigen/Core>

#include "uvapm/albedo.hpp"
#include "uvapm/image.hpp"
#include "uvapm/model.hpp"
#include "uvapm/rasterizer.hpp"
#include "uvapm/sh.hpp"

namespace uvapm {

// Reverse-mode building blocks for the fitting loop. All of them hold the
// rasterization correspondence fixed (frozen triangle ids, barycentrics and
// bilinear sampling weights), so pixel adjoints flow to texture texels,
// lighting, and the linear albedo decoders, never through visibility.

/// Scatter per-pixel adjoints back to texture texels through the frozen
/// sampling weights. Pixels with visibility 0 contribute nothing.
UVImage texture_adjoint(const RenderBuffers& buffers, const UVImage& pixel_adjoint,
                        int tex_width, int tex_height);

/// Adjoint of shade(): splits the texture adjoint into an albedo adjoint
/// and lighting-coefficient gradients. Uncovered texels pass straight
/// through to the albedo and never touch gamma.
struct ShadeBackward {
    UVImage albedo_adjoint;
    Eigen::Matrix<double, 3, 9> gamma_grad = Eigen::Matrix<double, 3, 9>::Zero();
};
ShadeBackward shade_backward(const UVImage& albedo, const SHCoeffs& gamma,
                             const NormalMap& normal_map, const UVImage& texture_adjoint);

/// Adjoint of fuse() at the given inputs. Uses the identity that adding a
/// V offset scales the RGB triple by (V + detail)/V, so away from ties the
/// Jacobian is analytic; the V clamp contributes subgradient 0.
struct FuseBackward {
    UVImage coarse_adjoint;      // w.r.t. the upsampled coarse RGB
    ChannelPlane detail_adjoint; // w.r.t. the detail plane
};
FuseBackward fuse_backward(const UVImage& coarse_upsampled, const ChannelPlane& detail,
                           const UVImage& output_adjoint);

/// Transpose of resize_bilinear (scatter through the same taps).
UVImage resize_bilinear_adjoint(const UVImage& output_adjoint, int in_width, int in_height);

/// dL/d(alpha_c): per channel basis^T applied to the albedo adjoint.
Eigen::VectorXd decode_coarse_adjoint(const UVAPMModel& model, const UVImage& albedo_adjoint);

/// dL/d(alpha_d): detail basis^T applied to the plane adjoint.
Eigen::VectorXd decode_detail_adjoint(const DetailBasis& basis, const ChannelPlane& plane_adjoint);

} // namespace uvapm
