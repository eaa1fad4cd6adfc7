#pragma once

#include <filesystem>

#include "uvapm/model.hpp"

namespace uvapm {

// Binary model files, little-endian throughout. Float payloads are 32-bit;
// the recorded dataset statistics are 64-bit.
//
//   UVAPM1: magic "UVAPM1", u16 version, u32 d, u32 k, u32 n_samples,
//           then per channel (R,G,B):
//             f64 total_variance
//             f32 mean[d*d]
//             f32 singular_values[k]
//             f32 basis[d*d * k]   (column-major)
//
//   UVDET1: magic "UVDET1", u16 version, u32 d_detail, u32 m, u32 n_samples,
//           then one channel block in the same layout.

void save_model(const UVAPMModel& model, const std::filesystem::path& path);
UVAPMModel load_model(const std::filesystem::path& path);

void save_detail_basis(const DetailBasis& basis, const std::filesystem::path& path);
DetailBasis load_detail_basis(const std::filesystem::path& path);

} // namespace uvapm
