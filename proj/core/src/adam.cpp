#include "uvapm/adam.hpp"

#include <cmath>
#include <string>

#include "uvapm/errors.hpp"

namespace uvapm {

void adam_step(Eigen::VectorXd& x, const Eigen::VectorXd& grad, AdamMoments& moments,
               const AdamParams& params, const char* label) {
    if (grad.size() != x.size()) {
        throw InvalidInputError(std::string("adam_step: gradient size ") +
                                std::to_string(grad.size()) + " does not match " + label +
                                " size " + std::to_string(x.size()));
    }
    if (!grad.allFinite()) {
        throw OptimizerError(std::string("adam_step: non-finite gradient for group '") +
                             label + "'");
    }
    if (moments.m.size() != x.size()) moments.reset(x.size());

    moments.t += 1;
    moments.m = params.beta1 * moments.m + (1.0 - params.beta1) * grad;
    moments.v = params.beta2 * moments.v + (1.0 - params.beta2) * grad.cwiseAbs2();

    const double bias1 = 1.0 - std::pow(params.beta1, moments.t);
    const double bias2 = 1.0 - std::pow(params.beta2, moments.t);

    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double m_hat = moments.m[i] / bias1;
        const double v_hat = moments.v[i] / bias2;
        x[i] -= params.learning_rate * m_hat / (std::sqrt(v_hat) + params.epsilon);
    }
}

} // namespace uvapm
