#pragma once

#include "uvapm/coeffs.hpp"
#include "uvapm/image.hpp"
#include "uvapm/model.hpp"

namespace uvapm {

/// Per channel mean + basis * alpha, merged back into an RGB map.
/// Values are left unclamped; clamping happens at save/render boundaries.
UVImage decode_coarse(const UVAPMModel& model, const CoarseCoeffs& alpha_c);

/// Signed V-channel offsets: mean + basis * alpha_d.
ChannelPlane decode_detail(const DetailBasis& basis, const DetailCoeffs& alpha_d);

/// Upsamples the coarse map to the detail resolution, adds the detail plane
/// to its V channel (clamping V to [0,1] before the inverse conversion), and
/// converts back to RGB. H and S are untouched.
UVImage fuse(const UVImage& coarse, const ChannelPlane& detail);

/// fuse(decode_coarse(...), decode_detail(...)).
UVImage generate(const UVAPMModel& model, const DetailBasis& basis,
                 const CoarseCoeffs& alpha_c, const DetailCoeffs& alpha_d);

/// Coarse-only output: decode and bilinearly upsample to d_out, no V fusion.
UVImage generate_coarse(const UVAPMModel& model, const CoarseCoeffs& alpha_c, int d_out);

} // namespace uvapm
