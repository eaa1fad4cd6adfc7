#include "uvapm/render_grad.hpp"

#include <cmath>

#include "resize_taps.hpp"
#include "uvapm/errors.hpp"

namespace uvapm {

UVImage texture_adjoint(const RenderBuffers& buffers, const UVImage& pixel_adjoint,
                        int tex_width, int tex_height) {
    if (pixel_adjoint.width != buffers.width || pixel_adjoint.height != buffers.height) {
        throw InvalidInputError("texture_adjoint: adjoint image does not match buffers");
    }
    const size_t n = buffers.pixel_count();
    if (buffers.visibility.size() != n || buffers.uv.size() != n * 2) {
        throw InvalidInputError("texture_adjoint: stale or mismatched buffers");
    }

    UVImage grad(tex_width, tex_height, 0.0);
    for (size_t i = 0; i < n; ++i) {
        if (!buffers.visibility[i]) continue;
        const BilinearTaps taps =
            bilinear_taps(tex_width, tex_height, buffers.uv[i * 2], buffers.uv[i * 2 + 1]);
        for (int tap = 0; tap < 4; ++tap) {
            for (int c = 0; c < 3; ++c) {
                grad.data[taps.idx[tap] * 3 + c] += taps.w[tap] * pixel_adjoint.data[i * 3 + c];
            }
        }
    }
    return grad;
}

ShadeBackward shade_backward(const UVImage& albedo, const SHCoeffs& gamma,
                             const NormalMap& normal_map, const UVImage& texture_adj) {
    if (albedo.width != normal_map.size || albedo.height != normal_map.size ||
        !texture_adj.same_size(albedo)) {
        throw InvalidInputError("shade_backward: dimension mismatch");
    }

    ShadeBackward out;
    out.albedo_adjoint = UVImage(albedo.width, albedo.height, 0.0);

    const size_t n = albedo.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        if (!normal_map.coverage[i]) {
            // Pass-through texel: T = A.
            for (int c = 0; c < 3; ++c) {
                out.albedo_adjoint.data[i * 3 + c] = texture_adj.data[i * 3 + c];
            }
            continue;
        }
        Eigen::Vector3d nrm(normal_map.normals[i * 3], normal_map.normals[i * 3 + 1],
                            normal_map.normals[i * 3 + 2]);
        const auto bands = sh_basis(nrm);
        for (int c = 0; c < 3; ++c) {
            double irradiance = 0.0;
            for (int k = 0; k < 9; ++k) irradiance += gamma.gamma(c, k) * bands[k];
            const double adj = texture_adj.data[i * 3 + c];
            out.albedo_adjoint.data[i * 3 + c] = adj * irradiance;
            const double a = albedo.data[i * 3 + c];
            for (int k = 0; k < 9; ++k) {
                out.gamma_grad(c, k) += adj * a * bands[k];
            }
        }
    }
    return out;
}

FuseBackward fuse_backward(const UVImage& coarse_upsampled, const ChannelPlane& detail,
                           const UVImage& output_adjoint) {
    if (coarse_upsampled.width != detail.width || coarse_upsampled.height != detail.height ||
        !output_adjoint.same_size(coarse_upsampled)) {
        throw InvalidInputError("fuse_backward: dimension mismatch");
    }

    FuseBackward out;
    out.coarse_adjoint = UVImage(coarse_upsampled.width, coarse_upsampled.height, 0.0);
    out.detail_adjoint = ChannelPlane(detail.width, detail.height, 0.0);

    const size_t n = coarse_upsampled.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        const double r = coarse_upsampled.data[i * 3 + 0];
        const double g = coarse_upsampled.data[i * 3 + 1];
        const double b = coarse_upsampled.data[i * 3 + 2];
        const double delta = detail.data[i];

        double v = r;
        int argmax = 0;
        if (g > v) { v = g; argmax = 1; }
        if (b > v) { v = b; argmax = 2; }

        const double v_shift = v + delta;
        const bool clamped = v_shift <= 0.0 || v_shift >= 1.0;
        const double v_out = std::clamp(v_shift, 0.0, 1.0);
        const double dv_out = clamped ? 0.0 : 1.0; // dv_out/dv == dv_out/ddelta

        const double* adj = &output_adjoint.data[i * 3];

        if (v <= 0.0) {
            // Achromatic branch: output is (v_out, v_out, v_out).
            const double sum_adj = adj[0] + adj[1] + adj[2];
            out.detail_adjoint.data[i] = sum_adj * dv_out;
            if (v < 0.0) {
                out.coarse_adjoint.data[i * 3 + argmax] = sum_adj * dv_out;
            }
            continue;
        }

        // Regular branch: out_c = rgb_c * v_out / v.
        const double dot = adj[0] * r + adj[1] * g + adj[2] * b;
        out.detail_adjoint.data[i] = dot / v * dv_out;
        for (int c = 0; c < 3; ++c) {
            out.coarse_adjoint.data[i * 3 + c] = adj[c] * (v_out / v);
        }
        out.coarse_adjoint.data[i * 3 + argmax] += dot * (dv_out - v_out / v) / v;
    }
    return out;
}

UVImage resize_bilinear_adjoint(const UVImage& output_adjoint, int in_width, int in_height) {
    if (in_width <= 0 || in_height <= 0) {
        throw InvalidInputError("resize_bilinear_adjoint: non-positive input size");
    }
    UVImage grad(in_width, in_height, 0.0);
    const double sx = static_cast<double>(in_width) / output_adjoint.width;
    const double sy = static_cast<double>(in_height) / output_adjoint.height;

    std::vector<detail::ResizeTap> cols(output_adjoint.width);
    for (int c = 0; c < output_adjoint.width; ++c) {
        cols[c] = detail::resize_tap(c, in_width, sx);
    }

    for (int r = 0; r < output_adjoint.height; ++r) {
        detail::ResizeTap ty = detail::resize_tap(r, in_height, sy);
        for (int c = 0; c < output_adjoint.width; ++c) {
            const detail::ResizeTap& tx = cols[c];
            for (int ch = 0; ch < 3; ++ch) {
                const double adj = output_adjoint.at(r, c, ch);
                grad.at(ty.lo, tx.lo, ch) += (1.0 - ty.w_hi) * (1.0 - tx.w_hi) * adj;
                grad.at(ty.lo, tx.hi, ch) += (1.0 - ty.w_hi) * tx.w_hi * adj;
                grad.at(ty.hi, tx.lo, ch) += ty.w_hi * (1.0 - tx.w_hi) * adj;
                grad.at(ty.hi, tx.hi, ch) += ty.w_hi * tx.w_hi * adj;
            }
        }
    }
    return grad;
}

Eigen::VectorXd decode_coarse_adjoint(const UVAPMModel& model, const UVImage& albedo_adjoint) {
    const int d = model.resolution();
    if (albedo_adjoint.width != d || albedo_adjoint.height != d) {
        throw InvalidInputError("decode_coarse_adjoint: adjoint resolution does not match model");
    }
    const int k = model.rank();
    Eigen::VectorXd grad(3 * k);
    auto [r, g, b] = split_channels(albedo_adjoint);
    const ChannelPlane* planes[3] = {&r, &g, &b};
    for (int ch = 0; ch < 3; ++ch) {
        grad.segment(static_cast<Eigen::Index>(ch) * k, k) =
            model.channels[ch].basis.transpose() * plane_to_vector(*planes[ch]);
    }
    return grad;
}

Eigen::VectorXd decode_detail_adjoint(const DetailBasis& basis, const ChannelPlane& plane_adjoint) {
    const int d = basis.resolution();
    if (plane_adjoint.width != d || plane_adjoint.height != d) {
        throw InvalidInputError("decode_detail_adjoint: adjoint resolution does not match basis");
    }
    return basis.channel.basis.transpose() * plane_to_vector(plane_adjoint);
}

} // namespace uvapm
