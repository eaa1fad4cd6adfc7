#pragma once

#include "uvapm/image.hpp"

namespace uvapm {

// Quantitative comparison metrics, reported in 8-bit units so the numbers
// are commensurate with the usual MSE/PSNR scales for byte images.

/// Mean squared error over all pixels and channels, with values mapped to
/// [0,255] first: 255^2 * mean((a-b)^2).
double mse(const UVImage& a, const UVImage& b);

/// 10*log10(255^2 / MSE), capped at 99 dB (identical images hit the cap).
double psnr(const UVImage& a, const UVImage& b);

/// SSIM with an 8x8 uniform window at stride 1, K1=0.01, K2=0.03, L=255,
/// averaged over the three channels. Images must be at least 8x8.
double ssim(const UVImage& a, const UVImage& b);

} // namespace uvapm
