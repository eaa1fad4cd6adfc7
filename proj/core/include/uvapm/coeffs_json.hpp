#pragma once

#include <filesystem>
#include <optional>

#include "uvapm/coeffs.hpp"

namespace uvapm {

/// CLI interchange format: {"alpha_c": [...], "alpha_d": [...]}.
/// alpha_d may be absent, in which case no detail layer is applied.
struct CoeffsFile {
    CoarseCoeffs alpha_c;
    std::optional<DetailCoeffs> alpha_d;
};

CoeffsFile load_coeffs_json(const std::filesystem::path& path);
void save_coeffs_json(const CoeffsFile& coeffs, const std::filesystem::path& path);

} // namespace uvapm
