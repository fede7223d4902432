#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

#include "limelens/models.hpp"
#include "limelens/sampling.hpp"

namespace limelens::theory {

/// Bandwidth-and-variance-mixed scaling parameters that govern every closed
/// form: mu_tilde = (nu^2 mu + sigma^2 xi)/(nu^2+sigma^2), sigma_tilde the
/// matching shrunk scale, c_d the expected weight E[pi], and a_d the
/// conditioning constant max_j 1/(alpha_j(1-alpha_j)) (NaN until a grid is
/// supplied).
struct ShrunkParams {
    Eigen::VectorXd mu_tilde;
    double sigma_tilde = 0.0;
    double c_d = 0.0;
    double a_d = std::numeric_limits<double>::quiet_NaN();
};

/// Every closed-form quantity for one (model, config, grid) triple.
struct TheoryReport {
    ShrunkParams shrunk;
    Eigen::VectorXd alpha;            // d, each in (0,1)
    Eigen::VectorXd theta;            // d, signed, |theta_j| <= sigma_tilde/sqrt(2 pi)
    Eigen::MatrixXd sigma_matrix;     // (d+1) x (d+1)
    Eigen::MatrixXd sigma_inverse;    // (d+1) x (d+1), arrowhead
    Eigen::VectorXd gamma;            // d+1
    Eigen::VectorXd beta;             // d+1, index 0 = intercept
    double local_error_center = 0.0;  // expected surrogate prediction at xi
    std::vector<std::optional<double>> v_crit;  // d, nullopt = unreachable
};

ShrunkParams shrunk_params(const SamplingConfig& config);
ShrunkParams shrunk_params(const SamplingConfig& config, const QuantileGrid& grid);

/// Expected weighted probability mass of xi's bin on coordinate j,
/// normalized by c_d: the erf bracket between the bin boundaries.
double alpha(Eigen::Index j, const SamplingConfig& config, const QuantileGrid& grid);

/// Signed Gaussian-density bracket on coordinate j; its zero switches the
/// feature off. Infinite boundaries contribute nothing.
double theta(Eigen::Index j, const SamplingConfig& config, const QuantileGrid& grid);

Eigen::VectorXd alpha_vector(const SamplingConfig& config, const QuantileGrid& grid);
Eigen::VectorXd theta_vector(const SamplingConfig& config, const QuantileGrid& grid);

/// Expected covariance matrix of the weighted design:
/// c_d * [[1, alpha^T], [alpha, M]] with M_jj = alpha_j, M_jk = alpha_j alpha_k.
Eigen::MatrixXd sigma_matrix(const SamplingConfig& config, const QuantileGrid& grid);

/// Closed-form arrowhead inverse of sigma_matrix. Throws NearDegenerateBin
/// when some alpha_j sits within 1e-12 of 0 or 1.
Eigen::MatrixXd sigma_inverse(const SamplingConfig& config, const QuantileGrid& grid);

/// Expected response vector c_d * (f(mu_tilde), alpha_j f(mu_tilde) - a_j theta_j).
/// The generic overload takes the gradient and the value f(mu_tilde) directly,
/// so gradient estimates of nonlinear models can reuse the formulas.
Eigen::VectorXd gamma_vector(const Eigen::VectorXd& gradient, double f_mu_tilde,
                             const SamplingConfig& config, const QuantileGrid& grid);
Eigen::VectorXd gamma_vector(const LinearModel& model, const SamplingConfig& config,
                             const QuantileGrid& grid);

/// Expected surrogate coefficients:
///   beta_0 = f(mu_tilde) + sum_j a_j theta_j / (1 - alpha_j)
///   beta_j = -a_j theta_j / (alpha_j (1 - alpha_j)).
Eigen::VectorXd beta_closed_form(const Eigen::VectorXd& gradient, double f_mu_tilde,
                                 const SamplingConfig& config, const QuantileGrid& grid);
Eigen::VectorXd beta_closed_form(const LinearModel& model, const SamplingConfig& config,
                                 const QuantileGrid& grid);

/// Expected surrogate prediction at xi: f(mu_tilde) - sum_j a_j theta_j / alpha_j.
/// Equals the coordinate sum of beta_closed_form.
double local_error_center(const Eigen::VectorXd& gradient, double f_mu_tilde,
                          const SamplingConfig& config, const QuantileGrid& grid);
double local_error_center(const LinearModel& model, const SamplingConfig& config,
                          const QuantileGrid& grid);

/// Bandwidth-squared at which theta_j vanishes:
///   sigma^2 (2 xi_j - q_- - q_+) / (-2 mu_j + q_- + q_+)
/// when that value is positive and finite; nullopt when xi_j's bin has an
/// infinite boundary, the denominator vanishes, or the value is not a
/// usable bandwidth.
std::optional<double> v_crit(Eigen::Index j, const SamplingConfig& config,
                             const QuantileGrid& grid);

/// Smallest n guaranteeing |beta_hat - beta| <= epsilon with probability
/// 1 - eta: the three-term maximum of the concentration bound, returned as
/// a double ceiling (the terms overflow integer types for tiny c_d).
double sample_size_bound(const LinearModel& model, const SamplingConfig& config,
                         const QuantileGrid& grid, double epsilon, double eta);

/// E[pi |x - xi|^2] = c_d (nu^4/(nu^2+sigma^2)^2 |xi-mu|^2 + nu^2 sigma^2 d/(nu^2+sigma^2)).
double expected_weighted_sqnorm(const SamplingConfig& config);

TheoryReport make_report(const Eigen::VectorXd& gradient, double f_mu_tilde,
                         const SamplingConfig& config, const QuantileGrid& grid);
TheoryReport make_report(const LinearModel& model, const SamplingConfig& config,
                         const QuantileGrid& grid);

}  // namespace limelens::theory
