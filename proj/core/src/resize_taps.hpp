#pragma once

// Source-tap computation for bilinear resize (half-pixel convention),
// shared by the forward resize and its adjoint. Internal header.

#include <algorithm>
#include <cmath>

namespace uvapm::detail {

struct ResizeTap {
    int lo;
    int hi;
    double w_hi; // weight of hi sample; lo gets (1 - w_hi)
};

inline ResizeTap resize_tap(int i, int src_size, double scale) {
    double s = (i + 0.5) * scale - 0.5;
    double fl = std::floor(s);
    int lo = static_cast<int>(fl);
    int hi = lo + 1;
    double w = s - fl;
    lo = std::clamp(lo, 0, src_size - 1);
    hi = std::clamp(hi, 0, src_size - 1);
    return {lo, hi, w};
}

} // namespace uvapm::detail
