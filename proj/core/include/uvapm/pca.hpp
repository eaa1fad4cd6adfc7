#pragma once

#include <Eigen/Core>

namespace uvapm {

struct PCAResult {
    Eigen::VectorXd mean;            // sample mean, length p
    Eigen::MatrixXd basis;           // p x r, orthonormal columns, r <= requested k
    Eigen::VectorXd singular_values; // data singular values, non-increasing
    double total_variance = 0.0;     // sum of all covariance eigenvalues (1/(N-1) scale)
};

/// Snapshot (Gram) PCA of N samples of dimension p, given as the columns of
/// `samples`. Only the N x N inner-product matrix is ever eigendecomposed,
/// so p can be large. Requires N >= 2 and k <= min(N-1, p); if the data's
/// numerical rank is below k the returned basis is clamped to that rank
/// rather than padded with arbitrary directions.
///
/// Column signs follow a fixed convention: the entry of largest magnitude
/// in each basis column is made positive (first such entry on ties), which
/// keeps results reproducible across runs and platforms.
PCAResult snapshot_pca(const Eigen::MatrixXd& samples, int k);

/// Flips v so that its largest-magnitude entry is positive. In-place.
void normalize_sign(Eigen::Ref<Eigen::VectorXd> v);

} // namespace uvapm
