#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "uvapm/camera.hpp"
#include "uvapm/image.hpp"
#include "uvapm/mesh.hpp"

namespace uvapm {

/// Output of the z-buffered rasterizer plus the correspondence buffers the
/// fitting gradients are computed against (triangle ids, barycentrics, and
/// interpolated UVs per covered pixel).
struct RenderBuffers {
    int width = 0;
    int height = 0;
    UVImage image;                    // sampled texture, black background
    ChannelPlane depth;               // view-space z, -inf where uncovered
    std::vector<int32_t> triangle_id; // -1 where uncovered
    std::vector<double> barycentrics; // 3 per pixel, sums to 1 where covered
    std::vector<double> uv;           // 2 per pixel
    std::vector<uint8_t> visibility;  // {0,1}

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// The four texels and weights a bilinear lookup touches (clamp-to-edge),
/// as linear indices into a tex_w * tex_h raster. Shared by the forward
/// sampler and the gradient scatter so the two can never disagree.
struct BilinearTaps {
    size_t idx[4];
    double w[4];
};
BilinearTaps bilinear_taps(int tex_w, int tex_h, double u, double v);

/// Bilinear texture lookup with clamp-to-edge addressing; uv (0,0) is the
/// bottom-left of the texture, image row 0 the top.
Eigen::Vector3d sample_bilinear(const UVImage& texture, double u, double v);

/// Projects vertices (row-vector weak perspective), rasterizes with a
/// z-buffer (larger view z wins; ties to the smaller triangle id so
/// submission order never matters), interpolates UVs with affine
/// barycentrics, and bilinearly samples the texture.
RenderBuffers render(const Eigen::MatrixX3d& vertices, const FaceMesh& mesh,
                     const UVImage& texture, const PoseCoeffs& pose,
                     int width, int height);

/// Samples a (possibly different) texture through frozen correspondence
/// buffers. The texture resolution may differ from the one used at
/// rasterization time.
UVImage resample_image(const RenderBuffers& buffers, const UVImage& texture);

/// resample_image, stored back into buffers.image.
void resample_texture(RenderBuffers& buffers, const UVImage& texture);

} // namespace uvapm
