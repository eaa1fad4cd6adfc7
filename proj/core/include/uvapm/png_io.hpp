#pragma once

#include <filesystem>
#include <optional>

#include "uvapm/image.hpp"

namespace uvapm {

// PNG is the only raster format. 8- and 16-bit samples map to [0,1] by
// division by (2^bits - 1); saving inverts with round-half-up after
// clamping to [0,1].

UVImage load_image(const std::filesystem::path& path);
void save_image(const UVImage& img, const std::filesystem::path& path, int bit_depth = 8);

/// Grayscale PNG <-> scalar plane.
ChannelPlane load_plane(const std::filesystem::path& path);
void save_plane(const ChannelPlane& plane, const std::filesystem::path& path, int bit_depth = 8);

/// W from a grayscale PNG; G from an optional binary PNG, else G = (W > 0).
FaceMask load_mask(const std::filesystem::path& weights_path,
                   const std::optional<std::filesystem::path>& skin_path = std::nullopt);

} // namespace uvapm
