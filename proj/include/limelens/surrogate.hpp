#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "limelens/models.hpp"
#include "limelens/sampling.hpp"

namespace limelens {

/// The fitted surrogate: beta_hat (index 0 = intercept), the surrogate's
/// prediction at xi (xi encodes as all-ones, so this is just the coordinate
/// sum), and the normal-matrix condition number.
struct Explanation {
    Eigen::VectorXd beta_hat;
    double prediction_at_xi = 0.0;
    std::int64_t n_used = 0;
    double condition_number = 0.0;
    SamplingConfig config_echo;
};

/// Prepends the phantom all-ones intercept column to the binary features.
Eigen::MatrixXd build_design(const Eigen::MatrixXi& features);

/// Solves (Z^T Pi Z + n ridge I) beta = Z^T Pi y, Pi = diag(weights).
/// With ridge = 0 this is the plain weighted normal equation; a condition
/// number beyond 1e12 then raises DegenerateDesign naming the constant
/// feature columns (the nu-too-small regime).
Eigen::VectorXd wls_solve(const Eigen::MatrixXd& design, const Eigen::VectorXd& responses,
                          const Eigen::VectorXd& weights, double ridge);

/// The full pipeline: perturb around xi, evaluate the model on every
/// sample, fit the weighted surrogate on the binary features.
Explanation explain(const BlackBoxModel& model, const SamplingConfig& config,
                    const QuantileGrid& grid, double ridge = 0.0);

}  // namespace limelens
