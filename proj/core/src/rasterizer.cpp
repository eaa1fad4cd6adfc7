#include "uvapm/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uvapm/errors.hpp"

namespace uvapm {

BilinearTaps bilinear_taps(int tex_w, int tex_h, double u, double v) {
    const double x = u * tex_w - 0.5;
    const double y = (1.0 - v) * tex_h - 0.5;

    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;

    const size_t cx0 = static_cast<size_t>(std::clamp(x0, 0, tex_w - 1));
    const size_t cx1 = static_cast<size_t>(std::clamp(x0 + 1, 0, tex_w - 1));
    const size_t cy0 = static_cast<size_t>(std::clamp(y0, 0, tex_h - 1));
    const size_t cy1 = static_cast<size_t>(std::clamp(y0 + 1, 0, tex_h - 1));

    BilinearTaps taps;
    taps.idx[0] = cy0 * tex_w + cx0;
    taps.idx[1] = cy0 * tex_w + cx1;
    taps.idx[2] = cy1 * tex_w + cx0;
    taps.idx[3] = cy1 * tex_w + cx1;
    taps.w[0] = (1.0 - fy) * (1.0 - fx);
    taps.w[1] = (1.0 - fy) * fx;
    taps.w[2] = fy * (1.0 - fx);
    taps.w[3] = fy * fx;
    return taps;
}

Eigen::Vector3d sample_bilinear(const UVImage& texture, double u, double v) {
    const BilinearTaps taps = bilinear_taps(texture.width, texture.height, u, v);
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int c = 0; c < 3; ++c) {
            out[c] += taps.w[i] * texture.data[taps.idx[i] * 3 + c];
        }
    }
    return out;
}

RenderBuffers render(const Eigen::MatrixX3d& vertices, const FaceMesh& mesh,
                     const UVImage& texture, const PoseCoeffs& pose,
                     int width, int height) {
    if (width <= 0 || height <= 0) {
        throw InvalidInputError("render: zero-area image");
    }
    if (vertices.rows() != mesh.vertex_count()) {
        throw InvalidInputError("render: vertex count does not match mesh");
    }

    RenderBuffers buf;
    buf.width = width;
    buf.height = height;
    buf.image = UVImage(width, height, 0.0);
    buf.depth = ChannelPlane(width, height, -std::numeric_limits<double>::infinity());
    buf.triangle_id.assign(buf.pixel_count(), -1);
    buf.barycentrics.assign(buf.pixel_count() * 3, 0.0);
    buf.uv.assign(buf.pixel_count() * 2, 0.0);
    buf.visibility.assign(buf.pixel_count(), 0);

    const Eigen::MatrixX3d view = view_transform(vertices, pose);
    const Viewport vp{width, height};

    Eigen::MatrixX2d px(view.rows(), 2);
    for (Eigen::Index i = 0; i < view.rows(); ++i) {
        px.row(i) = vp.to_pixels({view(i, 0), view(i, 1)}).transpose();
    }

    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Vector2d p0 = px.row(tri[0]);
        const Eigen::Vector2d p1 = px.row(tri[1]);
        const Eigen::Vector2d p2 = px.row(tri[2]);

        double area = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                      (p1.y() - p0.y()) * (p2.x() - p0.x());
        if (std::abs(area) < 1e-14) continue; // degenerate in screen space

        int min_x = std::max(0, static_cast<int>(std::ceil(std::min({p0.x(), p1.x(), p2.x()}))));
        int max_x = std::min(width - 1,
                             static_cast<int>(std::floor(std::max({p0.x(), p1.x(), p2.x()}))));
        int min_y = std::max(0, static_cast<int>(std::ceil(std::min({p0.y(), p1.y(), p2.y()}))));
        int max_y = std::min(height - 1,
                             static_cast<int>(std::floor(std::max({p0.y(), p1.y(), p2.y()}))));

        const double z0 = view(tri[0], 2), z1 = view(tri[1], 2), z2 = view(tri[2], 2);
        const Eigen::Vector2d uv0 = mesh.uvs[tri[0]];
        const Eigen::Vector2d uv1 = mesh.uvs[tri[1]];
        const Eigen::Vector2d uv2 = mesh.uvs[tri[2]];

        for (int y = min_y; y <= max_y; ++y) {
            for (int x = min_x; x <= max_x; ++x) {
                double w0 = ((p1.x() - x) * (p2.y() - y) - (p1.y() - y) * (p2.x() - x)) / area;
                double w1 = ((p2.x() - x) * (p0.y() - y) - (p2.y() - y) * (p0.x() - x)) / area;
                double w2 = 1.0 - w0 - w1;
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;

                const size_t idx = static_cast<size_t>(y) * width + x;
                const double z = w0 * z0 + w1 * z1 + w2 * z2;
                // Larger view z is closer; exact ties go to the smaller
                // triangle id so submission order cannot matter.
                if (z < buf.depth.data[idx]) continue;
                if (z == buf.depth.data[idx] &&
                    buf.triangle_id[idx] >= 0 &&
                    static_cast<int32_t>(t) > buf.triangle_id[idx]) {
                    continue;
                }

                buf.depth.data[idx] = z;
                buf.triangle_id[idx] = static_cast<int32_t>(t);
                buf.barycentrics[idx * 3 + 0] = w0;
                buf.barycentrics[idx * 3 + 1] = w1;
                buf.barycentrics[idx * 3 + 2] = w2;
                buf.uv[idx * 2 + 0] = w0 * uv0.x() + w1 * uv1.x() + w2 * uv2.x();
                buf.uv[idx * 2 + 1] = w0 * uv0.y() + w1 * uv1.y() + w2 * uv2.y();
                buf.visibility[idx] = 1;
            }
        }
    }

    resample_texture(buf, texture);
    return buf;
}

UVImage resample_image(const RenderBuffers& buffers, const UVImage& texture) {
    if (texture.width <= 0 || texture.height <= 0) {
        throw InvalidInputError("resample_image: empty texture");
    }
    const size_t n = buffers.pixel_count();
    if (buffers.visibility.size() != n || buffers.uv.size() != n * 2) {
        throw InvalidInputError("resample_image: stale or mismatched buffers");
    }
    UVImage image(buffers.width, buffers.height, 0.0);
    for (size_t i = 0; i < n; ++i) {
        if (!buffers.visibility[i]) continue;
        Eigen::Vector3d c = sample_bilinear(texture, buffers.uv[i * 2], buffers.uv[i * 2 + 1]);
        image.data[i * 3 + 0] = c[0];
        image.data[i * 3 + 1] = c[1];
        image.data[i * 3 + 2] = c[2];
    }
    return image;
}

void resample_texture(RenderBuffers& buffers, const UVImage& texture) {
    buffers.image = resample_image(buffers, texture);
}

} // namespace uvapm
