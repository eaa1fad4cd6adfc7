#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

namespace uvapm {

/// Three-channel raster, RGB interleaved, row-major, nominal range [0,1].
/// Values outside [0,1] may appear transiently during coefficient math and
/// are only clamped at explicit save/render boundaries.
struct UVImage {
    int width = 0;
    int height = 0;
    std::vector<double> data; // width*height*3

    UVImage() = default;
    UVImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h * 3, fill) {}

    double& at(int row, int col, int ch) {
        return data[(static_cast<size_t>(row) * width + col) * 3 + ch];
    }
    double at(int row, int col, int ch) const {
        return data[(static_cast<size_t>(row) * width + col) * 3 + ch];
    }
    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool same_size(const UVImage& o) const {
        return width == o.width && height == o.height;
    }
};

/// Single scalar plane, row-major.
struct ChannelPlane {
    int width = 0;
    int height = 0;
    std::vector<double> data; // width*height

    ChannelPlane() = default;
    ChannelPlane(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    double& at(int row, int col) {
        return data[static_cast<size_t>(row) * width + col];
    }
    double at(int row, int col) const {
        return data[static_cast<size_t>(row) * width + col];
    }
    size_t size() const { return data.size(); }
    bool same_size(const ChannelPlane& o) const {
        return width == o.width && height == o.height;
    }
};

/// Per-pixel photometric weights W >= 0 plus a binary skin indicator G.
struct FaceMask {
    ChannelPlane weights; // W, non-negative
    ChannelPlane skin;    // G, strictly {0,1}

    int width() const { return weights.width; }
    int height() const { return weights.height; }
};

bool all_finite(const UVImage& img);
bool all_finite(const ChannelPlane& plane);

/// merge(split(x)) == x bit-exactly.
std::tuple<ChannelPlane, ChannelPlane, ChannelPlane> split_channels(const UVImage& img);
UVImage merge_channels(const ChannelPlane& r, const ChannelPlane& g, const ChannelPlane& b);

/// Bilinear resize with the half-pixel (align-corners = false) convention.
/// At an exact 2:1 shrink this reduces to 2x2 box averaging, which is how
/// dataset images are brought down to the model resolution.
UVImage resize_bilinear(const UVImage& img, int out_width, int out_height);
ChannelPlane resize_bilinear(const ChannelPlane& plane, int out_width, int out_height);

/// Validates W >= 0, G in {0,1} and matching dimensions.
FaceMask make_mask(ChannelPlane weights, ChannelPlane skin);
/// Absent G defaults to G = (W > 0).
FaceMask make_mask(ChannelPlane weights);

} // namespace uvapm
