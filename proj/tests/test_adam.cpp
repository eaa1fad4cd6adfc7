#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "uvapm/adam.hpp"
#include "uvapm/errors.hpp"

using namespace uvapm;

TEST_CASE("zero gradient leaves parameters unchanged") {
    Eigen::VectorXd x(3);
    x << 1.0, -2.0, 3.0;
    Eigen::VectorXd x0 = x;
    AdamMoments moments;
    moments.reset(3);
    adam_step(x, Eigen::VectorXd::Zero(3), moments, AdamParams{});
    CHECK(x == x0);
}

TEST_CASE("first step matches the scalar reference to 1e-12") {
    AdamParams params;
    params.learning_rate = 1e-3;

    Eigen::VectorXd x(1);
    x << 0.5;
    AdamMoments moments;
    moments.reset(1);
    Eigen::VectorXd g(1);
    g << 1.0;
    adam_step(x, g, moments, params);

    oracle::ScalarAdam ref;
    const double expected = ref.step(0.5, 1.0, 1e-3);
    CHECK(std::abs(x[0] - expected) <= 1e-12);
    // First-step magnitude is ~lr for a unit gradient.
    CHECK(std::abs((0.5 - x[0]) - 1e-3) <= 1e-6);
}

TEST_CASE("constant-gradient trajectory matches the scalar reference") {
    AdamParams params;
    params.learning_rate = 1e-3;

    Eigen::VectorXd x(2);
    x << 0.0, 5.0;
    AdamMoments moments;
    moments.reset(2);
    oracle::ScalarAdam ref0, ref1;
    double r0 = 0.0, r1 = 5.0;

    Eigen::VectorXd g(2);
    g << 0.3, -2.0;
    for (int step = 0; step < 25; ++step) {
        adam_step(x, g, moments, params);
        r0 = ref0.step(r0, 0.3, 1e-3);
        r1 = ref1.step(r1, -2.0, 1e-3);
        CHECK(std::abs(x[0] - r0) <= 1e-12);
        CHECK(std::abs(x[1] - r1) <= 1e-12);
    }
}

TEST_CASE("non-finite gradients name the group") {
    Eigen::VectorXd x(2);
    x << 0.0, 0.0;
    AdamMoments moments;
    moments.reset(2);
    Eigen::VectorXd g(2);
    g << 1.0, std::nan("");
    try {
        adam_step(x, g, moments, AdamParams{}, "gamma");
        FAIL("expected OptimizerError");
    } catch (const OptimizerError& e) {
        CHECK(std::string(e.what()).find("gamma") != std::string::npos);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    Eigen::VectorXd x(2);
    x << 0.0, 0.0;
    AdamMoments moments;
    moments.reset(2);
    CHECK_THROWS_AS(adam_step(x, Eigen::VectorXd::Zero(3), moments, AdamParams{}),
                    InvalidInputError);
}
