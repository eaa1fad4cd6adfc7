#pragma once

#include <array>

#include <Eigen/Core>

#include "uvapm/image.hpp"
#include "uvapm/normals.hpp"

namespace uvapm {

/// Spherical-harmonics lighting coefficients, one 9-band row per color
/// channel (R,G,B).
struct SHCoeffs {
    Eigen::Matrix<double, 3, 9> gamma = Eigen::Matrix<double, 3, 9>::Zero();

    // Flat layout: channel-major, gamma[c*9 + k].
    Eigen::VectorXd to_vector() const;
    static SHCoeffs from_vector(const Eigen::VectorXd& v);
};

/// Value of the constant band, 1/(2*sqrt(pi)). Setting every channel's
/// first coefficient to 1/kSHConstantBand makes shading the identity.
inline constexpr double kSHConstantBand = 0.28209479177387814;

/// Real SH bands l = 0..2 at a unit normal, ordered
/// (1, y, z, x, xy, yz, 3z^2-1, xz, x^2-y^2) with the standard real
/// normalization constants. The normal must be unit length within 1e-3.
std::array<double, 9> sh_basis(const Eigen::Vector3d& normal);

/// Per texel and channel: T_c = A_c * sum_k gamma_{c,k} H_k(N). Uncovered
/// texels pass the albedo through unlit. Result is left unclamped.
UVImage shade(const UVImage& albedo, const SHCoeffs& gamma, const NormalMap& normal_map);

} // namespace uvapm
