#pragma once

#include <Eigen/Dense>
#include <vector>

// Independent reference implementations for the checks that must not share
// code with the library paths they validate.
namespace oracles {

/// Inverse standard normal CDF by bisection on erfc; slow, ~1 ulp.
double bisect_normal_quantile(double p);

/// Dense solve by Gauss-Jordan elimination with partial pivoting.
Eigen::VectorXd gauss_jordan_solve(Eigen::MatrixXd a, Eigen::VectorXd b);

/// Upper-tail p-value of a chi-square statistic (regularized incomplete
/// gamma, series + continued fraction).
double chi_square_pvalue(double stat, int dof);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

}  // namespace oracles
