#pragma once

#include <Eigen/Core>

namespace uvapm {

struct AdamParams {
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators for one coefficient group.
struct AdamMoments {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    int t = 0;

    void reset(Eigen::Index size) {
        m = Eigen::VectorXd::Zero(size);
        v = Eigen::VectorXd::Zero(size);
        t = 0;
    }
};

/// Standard bias-corrected Adam update, in place:
///   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
///   x -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
/// Throws OptimizerError on non-finite gradients and InvalidInputError on
/// dimension mismatches; `label` names the offending group.
void adam_step(Eigen::VectorXd& x, const Eigen::VectorXd& grad, AdamMoments& moments,
               const AdamParams& params, const char* label = "coefficients");

} // namespace uvapm
