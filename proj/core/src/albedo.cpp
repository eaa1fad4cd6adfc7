#include "uvapm/albedo.hpp"

#include <algorithm>
#include <string>

#include "uvapm/color.hpp"
#include "uvapm/errors.hpp"

namespace uvapm {

UVImage decode_coarse(const UVAPMModel& model, const CoarseCoeffs& alpha_c) {
    const int k = model.rank();
    if (alpha_c.values.size() != 3 * k) {
        throw InvalidInputError("decode_coarse: expected " + std::to_string(3 * k) +
                                " coefficients, got " + std::to_string(alpha_c.values.size()));
    }
    if (!alpha_c.values.allFinite()) {
        throw InvalidInputError("decode_coarse: non-finite coefficient");
    }
    const int d = model.resolution();
    ChannelPlane planes[3];
    for (int ch = 0; ch < 3; ++ch) {
        const AlbedoChannelBasis& basis = model.channels[ch];
        Eigen::VectorXd x = basis.mean;
        if (k > 0) {
            x.noalias() += basis.basis * alpha_c.values.segment(static_cast<Eigen::Index>(ch) * k, k);
        }
        planes[ch] = vector_to_plane(x, d, d);
    }
    return merge_channels(planes[0], planes[1], planes[2]);
}

ChannelPlane decode_detail(const DetailBasis& basis, const DetailCoeffs& alpha_d) {
    const int m = basis.rank();
    if (alpha_d.values.size() != m) {
        throw InvalidInputError("decode_detail: expected " + std::to_string(m) +
                                " coefficients, got " + std::to_string(alpha_d.values.size()));
    }
    if (!alpha_d.values.allFinite()) {
        throw InvalidInputError("decode_detail: non-finite coefficient");
    }
    Eigen::VectorXd x = basis.channel.mean;
    if (m > 0) {
        x.noalias() += basis.channel.basis * alpha_d.values;
    }
    return vector_to_plane(x, basis.resolution(), basis.resolution());
}

UVImage fuse(const UVImage& coarse, const ChannelPlane& detail) {
    if (detail.width < coarse.width || detail.height < coarse.height) {
        throw InvalidInputError("fuse: detail plane smaller than coarse map");
    }
    UVImage up = resize_bilinear(coarse, detail.width, detail.height);
    UVImage hsv = rgb_to_hsv(up);
    if (!all_finite(detail)) {
        throw InvalidInputError("fuse: non-finite detail value");
    }
    const size_t n = hsv.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        double v = hsv.data[i * 3 + 2] + detail.data[i];
        hsv.data[i * 3 + 2] = std::clamp(v, 0.0, 1.0);
    }
    return hsv_to_rgb(hsv);
}

UVImage generate(const UVAPMModel& model, const DetailBasis& basis,
                 const CoarseCoeffs& alpha_c, const DetailCoeffs& alpha_d) {
    return fuse(decode_coarse(model, alpha_c), decode_detail(basis, alpha_d));
}

UVImage generate_coarse(const UVAPMModel& model, const CoarseCoeffs& alpha_c, int d_out) {
    UVImage coarse = decode_coarse(model, alpha_c);
    if (d_out < model.resolution()) {
        throw InvalidInputError("generate_coarse: output resolution below model resolution");
    }
    return resize_bilinear(coarse, d_out, d_out);
}

} // namespace uvapm
