#include "uvapm/image.hpp"

#include <algorithm>
#include <cmath>

#include "resize_taps.hpp"
#include "uvapm/errors.hpp"

namespace uvapm {

bool all_finite(const UVImage& img) {
    return std::all_of(img.data.begin(), img.data.end(),
                       [](double v) { return std::isfinite(v); });
}

bool all_finite(const ChannelPlane& plane) {
    return std::all_of(plane.data.begin(), plane.data.end(),
                       [](double v) { return std::isfinite(v); });
}

std::tuple<ChannelPlane, ChannelPlane, ChannelPlane> split_channels(const UVImage& img) {
    ChannelPlane r(img.width, img.height);
    ChannelPlane g(img.width, img.height);
    ChannelPlane b(img.width, img.height);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        r.data[i] = img.data[i * 3 + 0];
        g.data[i] = img.data[i * 3 + 1];
        b.data[i] = img.data[i * 3 + 2];
    }
    return {std::move(r), std::move(g), std::move(b)};
}

UVImage merge_channels(const ChannelPlane& r, const ChannelPlane& g, const ChannelPlane& b) {
    if (!r.same_size(g) || !r.same_size(b)) {
        throw InvalidInputError("merge_channels: plane dimensions differ");
    }
    UVImage img(r.width, r.height);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        img.data[i * 3 + 0] = r.data[i];
        img.data[i * 3 + 1] = g.data[i];
        img.data[i * 3 + 2] = b.data[i];
    }
    return img;
}

using detail::ResizeTap;
using detail::resize_tap;

UVImage resize_bilinear(const UVImage& img, int out_width, int out_height) {
    if (img.width <= 0 || img.height <= 0) {
        throw InvalidInputError("resize_bilinear: empty source image");
    }
    if (out_width <= 0 || out_height <= 0) {
        throw InvalidInputError("resize_bilinear: non-positive target size");
    }
    if (out_width == img.width && out_height == img.height) return img;

    UVImage out(out_width, out_height);
    const double sx = static_cast<double>(img.width) / out_width;
    const double sy = static_cast<double>(img.height) / out_height;

    std::vector<ResizeTap> cols(out_width);
    for (int c = 0; c < out_width; ++c) cols[c] = resize_tap(c, img.width, sx);

    for (int r = 0; r < out_height; ++r) {
        ResizeTap ty = resize_tap(r, img.height, sy);
        for (int c = 0; c < out_width; ++c) {
            const ResizeTap& tx = cols[c];
            for (int ch = 0; ch < 3; ++ch) {
                double top = (1.0 - tx.w_hi) * img.at(ty.lo, tx.lo, ch) +
                             tx.w_hi * img.at(ty.lo, tx.hi, ch);
                double bot = (1.0 - tx.w_hi) * img.at(ty.hi, tx.lo, ch) +
                             tx.w_hi * img.at(ty.hi, tx.hi, ch);
                out.at(r, c, ch) = (1.0 - ty.w_hi) * top + ty.w_hi * bot;
            }
        }
    }
    return out;
}

ChannelPlane resize_bilinear(const ChannelPlane& plane, int out_width, int out_height) {
    if (plane.width <= 0 || plane.height <= 0) {
        throw InvalidInputError("resize_bilinear: empty source plane");
    }
    if (out_width <= 0 || out_height <= 0) {
        throw InvalidInputError("resize_bilinear: non-positive target size");
    }
    if (out_width == plane.width && out_height == plane.height) return plane;

    ChannelPlane out(out_width, out_height);
    const double sx = static_cast<double>(plane.width) / out_width;
    const double sy = static_cast<double>(plane.height) / out_height;

    std::vector<ResizeTap> cols(out_width);
    for (int c = 0; c < out_width; ++c) cols[c] = resize_tap(c, plane.width, sx);

    for (int r = 0; r < out_height; ++r) {
        ResizeTap ty = resize_tap(r, plane.height, sy);
        for (int c = 0; c < out_width; ++c) {
            const ResizeTap& tx = cols[c];
            double top = (1.0 - tx.w_hi) * plane.at(ty.lo, tx.lo) +
                         tx.w_hi * plane.at(ty.lo, tx.hi);
            double bot = (1.0 - tx.w_hi) * plane.at(ty.hi, tx.lo) +
                         tx.w_hi * plane.at(ty.hi, tx.hi);
            out.at(r, c) = (1.0 - ty.w_hi) * top + ty.w_hi * bot;
        }
    }
    return out;
}

FaceMask make_mask(ChannelPlane weights, ChannelPlane skin) {
    if (!weights.same_size(skin)) {
        throw InvalidInputError("make_mask: W and G dimensions differ");
    }
    for (double w : weights.data) {
        if (!std::isfinite(w) || w < 0.0) {
            throw InvalidInputError("make_mask: mask weights must be finite and >= 0");
        }
    }
    for (double g : skin.data) {
        if (g != 0.0 && g != 1.0) {
            throw InvalidInputError("make_mask: skin indicator must be 0 or 1");
        }
    }
    return FaceMask{std::move(weights), std::move(skin)};
}

FaceMask make_mask(ChannelPlane weights) {
    ChannelPlane skin(weights.width, weights.height);
    for (size_t i = 0; i < weights.data.size(); ++i) {
        skin.data[i] = weights.data[i] > 0.0 ? 1.0 : 0.0;
    }
    return make_mask(std::move(weights), std::move(skin));
}

} // namespace uvapm
