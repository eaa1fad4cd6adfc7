#include "uvapm/sh.hpp"

#include <cmath>

#include "uvapm/errors.hpp"

namespace uvapm {

Eigen::VectorXd SHCoeffs::to_vector() const {
    Eigen::VectorXd v(27);
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 9; ++k) v[c * 9 + k] = gamma(c, k);
    return v;
}

SHCoeffs SHCoeffs::from_vector(const Eigen::VectorXd& v) {
    if (v.size() != 27) {
        throw InvalidInputError("SHCoeffs: expected 27 values, got " + std::to_string(v.size()));
    }
    SHCoeffs out;
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 9; ++k) out.gamma(c, k) = v[c * 9 + k];
    return out;
}

std::array<double, 9> sh_basis(const Eigen::Vector3d& normal) {
    const double len = normal.norm();
    if (std::abs(len - 1.0) > 1e-3) {
        throw InvalidInputError("sh_basis: normal must be unit length (got norm " +
                                std::to_string(len) + ")");
    }
    const double x = normal.x(), y = normal.y(), z = normal.z();

    // Standard real SH normalization constants for l = 0..2.
    constexpr double c0 = 0.28209479177387814;  // 1/(2 sqrt(pi))
    constexpr double c1 = 0.4886025119029199;   // sqrt(3/(4 pi))
    constexpr double c2 = 1.0925484305920792;   // sqrt(15/(4 pi))
    constexpr double c3 = 0.31539156525252005;  // sqrt(5/(16 pi))
    constexpr double c4 = 0.5462742152960396;   // sqrt(15/(16 pi))

    return {
        c0,
        c1 * y,
        c1 * z,
        c1 * x,
        c2 * x * y,
        c2 * y * z,
        c3 * (3.0 * z * z - 1.0),
        c2 * x * z,
        c4 * (x * x - y * y),
    };
}

UVImage shade(const UVImage& albedo, const SHCoeffs& gamma, const NormalMap& normal_map) {
    if (albedo.width != normal_map.size || albedo.height != normal_map.size) {
        throw InvalidInputError("shade: albedo resolution " + std::to_string(albedo.width) + "x" +
                                std::to_string(albedo.height) + " does not match normal map " +
                                std::to_string(normal_map.size));
    }
    if (!gamma.gamma.allFinite()) {
        throw InvalidInputError("shade: non-finite lighting coefficient");
    }

    UVImage out(albedo.width, albedo.height);
    const size_t n = albedo.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        if (!normal_map.coverage[i]) {
            for (int c = 0; c < 3; ++c) out.data[i * 3 + c] = albedo.data[i * 3 + c];
            continue;
        }
        Eigen::Vector3d nrm(normal_map.normals[i * 3], normal_map.normals[i * 3 + 1],
                            normal_map.normals[i * 3 + 2]);
        const auto bands = sh_basis(nrm);
        for (int c = 0; c < 3; ++c) {
            double irradiance = 0.0;
            for (int k = 0; k < 9; ++k) irradiance += gamma.gamma(c, k) * bands[k];
            out.data[i * 3 + c] = albedo.data[i * 3 + c] * irradiance;
        }
    }
    return out;
}

} // namespace uvapm
