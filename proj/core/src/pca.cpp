#include "uvapm/pca.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "uvapm/errors.hpp"

namespace uvapm {

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double a = std::abs(v[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (v[best] < 0.0) v = -v;
}

PCAResult snapshot_pca(const Eigen::MatrixXd& samples, int k) {
    const Eigen::Index p = samples.rows();
    const Eigen::Index n = samples.cols();
    if (n < 2) {
        throw InsufficientDataError("snapshot_pca: need at least 2 samples, got " +
                                    std::to_string(n));
    }
    const Eigen::Index max_rank = std::min<Eigen::Index>(n - 1, p);
    if (k < 0 || k > max_rank) {
        throw InvalidRankError("snapshot_pca: rank " + std::to_string(k) +
                               " exceeds min(N-1, dim) = " + std::to_string(max_rank));
    }

    PCAResult out;
    out.mean = samples.rowwise().mean();

    Eigen::MatrixXd centered = samples.colwise() - out.mean;
    Eigen::MatrixXd gram = centered.transpose() * centered; // N x N

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) {
        throw Error("snapshot_pca: eigendecomposition failed");
    }
    // Eigen returns eigenvalues in ascending order.
    const Eigen::VectorXd& evals = eig.eigenvalues();
    const Eigen::MatrixXd& evecs = eig.eigenvectors();

    const double max_eval = std::max(evals[n - 1], 0.0);
    out.total_variance = std::max(gram.trace(), 0.0) / static_cast<double>(n - 1);

    // Directions below the snapshot method's resolving power are treated as
    // rank-deficient; the basis is clamped instead of padded. The absolute
    // floor keeps pure cancellation noise (identical samples) at rank 0:
    // centering leaves entries of order eps * |data|, whose Gram eigenvalues
    // scale with eps^2 * raw energy.
    constexpr double kEps = 2.220446049250313e-16;
    const double raw_energy = samples.squaredNorm();
    const double rank_tol = std::max(max_eval * static_cast<double>(n) * 1e-14,
                                     raw_energy * static_cast<double>(n) * kEps * kEps * 16.0);
    int effective_rank = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (evals[i] > rank_tol && evals[i] > 0.0) ++effective_rank;
    }
    const int r = std::min<int>(k, effective_rank);

    out.basis.resize(p, r);
    out.singular_values.resize(r);
    for (int j = 0; j < r; ++j) {
        const Eigen::Index src = n - 1 - j; // descending eigenvalue order
        const double sigma = std::sqrt(evals[src]);
        out.singular_values[j] = sigma;
        Eigen::VectorXd u = centered * evecs.col(src) / sigma;
        u.normalize();
        normalize_sign(u);
        out.basis.col(j) = u;
    }
    return out;
}

} // namespace uvapm
