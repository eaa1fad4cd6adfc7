#include "uvapm/color.hpp"

#include <algorithm>
#include <cmath>

#include "uvapm/errors.hpp"

namespace uvapm {

std::array<double, 3> rgb_to_hsv_pixel(double r, double g, double b) {
    double maxc = std::max({r, g, b});
    double minc = std::min({r, g, b});
    double delta = maxc - minc;

    double v = maxc;
    double s = maxc > 0.0 ? delta / maxc : 0.0;
    double h = 0.0;
    if (delta > 0.0) {
        if (maxc == r) {
            h = (g - b) / delta;
            if (h < 0.0) h += 6.0;
        } else if (maxc == g) {
            h = (b - r) / delta + 2.0;
        } else {
            h = (r - g) / delta + 4.0;
        }
        h /= 6.0;
        if (h >= 1.0) h -= 1.0;
    }
    return {h, s, v};
}

std::array<double, 3> hsv_to_rgb_pixel(double h, double s, double v) {
    if (s <= 0.0) return {v, v, v};

    double hh = (h - std::floor(h)) * 6.0; // wrap into [0,6)
    int sextant = static_cast<int>(hh);
    if (sextant > 5) sextant = 5;
    double f = hh - sextant;

    double p = v * (1.0 - s);
    double q = v * (1.0 - s * f);
    double t = v * (1.0 - s * (1.0 - f));

    switch (sextant) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

UVImage rgb_to_hsv(const UVImage& img) {
    if (!all_finite(img)) {
        throw InvalidInputError("rgb_to_hsv: non-finite pixel value");
    }
    UVImage out(img.width, img.height);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        auto hsv = rgb_to_hsv_pixel(img.data[i * 3 + 0], img.data[i * 3 + 1],
                                    img.data[i * 3 + 2]);
        out.data[i * 3 + 0] = hsv[0];
        out.data[i * 3 + 1] = hsv[1];
        out.data[i * 3 + 2] = hsv[2];
    }
    return out;
}

UVImage hsv_to_rgb(const UVImage& img) {
    if (!all_finite(img)) {
        throw InvalidInputError("hsv_to_rgb: non-finite pixel value");
    }
    UVImage out(img.width, img.height);
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        auto rgb = hsv_to_rgb_pixel(img.data[i * 3 + 0], img.data[i * 3 + 1],
                                    img.data[i * 3 + 2]);
        for (int ch = 0; ch < 3; ++ch) {
            out.data[i * 3 + ch] = std::clamp(rgb[ch], 0.0, 1.0);
        }
    }
    return out;
}

} // namespace uvapm
