#pragma once

#include <Eigen/Core>

namespace uvapm {

/// Coarse albedo coefficients, channel-major: R block, then G, then B.
struct CoarseCoeffs {
    Eigen::VectorXd values; // 3k

    CoarseCoeffs() = default;
    explicit CoarseCoeffs(Eigen::VectorXd v) : values(std::move(v)) {}
    static CoarseCoeffs zero(int k) { return CoarseCoeffs(Eigen::VectorXd::Zero(3 * k)); }
};

/// Detail (V-channel residual) coefficients.
struct DetailCoeffs {
    Eigen::VectorXd values; // m

    DetailCoeffs() = default;
    explicit DetailCoeffs(Eigen::VectorXd v) : values(std::move(v)) {}
    static DetailCoeffs zero(int m) { return DetailCoeffs(Eigen::VectorXd::Zero(m)); }
};

} // namespace uvapm
