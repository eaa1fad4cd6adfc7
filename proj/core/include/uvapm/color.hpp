#pragma once

#include <array>

#include "uvapm/image.hpp"

namespace uvapm {

// Hexcone HSV conversion. Hue is stored in [0,1) instead of degrees so every
// channel shares the same range. Achromatic pixels get H = 0, S = 0.

std::array<double, 3> rgb_to_hsv_pixel(double r, double g, double b);
std::array<double, 3> hsv_to_rgb_pixel(double h, double s, double v);

/// Per-pixel hexcone conversion; channels of the result are (H,S,V) in [0,1].
/// Throws InvalidInputError on non-finite input.
UVImage rgb_to_hsv(const UVImage& img);

/// Inverse hexcone conversion; output clamped to [0,1].
/// Throws InvalidInputError on non-finite input.
UVImage hsv_to_rgb(const UVImage& img);

} // namespace uvapm
