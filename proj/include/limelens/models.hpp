#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace limelens {

/// A regression function f: R^d -> R under explanation. Implementations are
/// immutable after construction and evaluation is pure, so models can be
/// shared freely across threads.
class BlackBoxModel {
public:
    virtual ~BlackBoxModel() = default;
    virtual Eigen::Index dim() const = 0;
    /// Raw evaluation; dimension is not checked here (see eval()).
    virtual double value(const Eigen::VectorXd& x) const = 0;
};

/// f(x) = a.x + b.
class LinearModel final : public BlackBoxModel {
public:
    LinearModel(Eigen::VectorXd a, double b) : a_(std::move(a)), b_(b) {}

    Eigen::Index dim() const override { return a_.size(); }
    double value(const Eigen::VectorXd& x) const override { return a_.dot(x) + b_; }

    const Eigen::VectorXd& coefficients() const { return a_; }
    double intercept() const { return b_; }

private:
    Eigen::VectorXd a_;
    double b_;
};

/// Gaussian-kernel ridge regressor: f(x) = sum_i c_i exp(-|x - x_i|^2 / (2 s^2)),
/// with c solving (K + ridge I) c = y on the training set.
class KernelRidgeModel final : public BlackBoxModel {
public:
    KernelRidgeModel(Eigen::MatrixXd train_x, Eigen::VectorXd dual_coeffs,
                     double kernel_scale, double ridge);

    Eigen::Index dim() const override { return train_x_.cols(); }
    double value(const Eigen::VectorXd& x) const override;

    const Eigen::MatrixXd& train_x() const { return train_x_; }
    const Eigen::VectorXd& dual_coeffs() const { return dual_coeffs_; }
    double kernel_scale() const { return kernel_scale_; }
    double ridge() const { return ridge_; }

private:
    Eigen::MatrixXd train_x_;
    Eigen::VectorXd dual_coeffs_;
    double kernel_scale_;
    double ridge_;
};

/// Numeric table: m rows of d features, optional targets, d feature names.
struct Dataset {
    Eigen::MatrixXd rows;
    std::optional<Eigen::VectorXd> targets;
    std::vector<std::string> feature_names;

    Eigen::Index size() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
    /// m >= 2, all entries finite, feature_names matches d.
    void validate() const;
};

/// Isotropic Gaussian fit: per-feature mean, one pooled scale (square root
/// of the average unbiased per-feature variance), plus the per-feature
/// standard deviations for diagnostics.
struct GaussianFit {
    Eigen::VectorXd mu;
    double sigma = 0.0;
    Eigen::VectorXd per_feature_sigma;
};

/// Dimension-checked evaluation of f at x.
double eval(const BlackBoxModel& model, const Eigen::VectorXd& x);

/// Solves (K + ridge I) c = y with K the Gaussian kernel Gram matrix and
/// verifies the solve to 1e-8 relative residual.
KernelRidgeModel train_kernel_ridge(const Dataset& data, double kernel_scale, double ridge);

/// Ordinary least squares with intercept; used to fit the linear model of
/// the dataset experiments.
LinearModel fit_linear(const Dataset& data);

/// Central differences (f(x + h e_j) - f(x - h e_j)) / (2h) with a fixed step.
Eigen::VectorXd finite_diff_gradient(const BlackBoxModel& model, const Eigen::VectorXd& x,
                                     double h);

/// Central differences with the relative step 1e-4 * max(1, |x_j|) per coordinate.
Eigen::VectorXd finite_diff_gradient(const BlackBoxModel& model, const Eigen::VectorXd& x);

/// Reads a comma-separated numeric table (optional single header row,
/// '.' decimal separator, rows of equal length). target_column selects a
/// column by header name, or by 0-based index when there is no header (or
/// the name parses as an integer); that column is split off into targets.
Dataset load_dataset(const std::filesystem::path& path, bool has_header,
                     const std::optional<std::string>& target_column = std::nullopt);

/// Inverse of load_dataset: header (feature names, then target name if
/// present) followed by the numeric table at 17 significant digits.
void save_dataset(const Dataset& data, const std::filesystem::path& path);

GaussianFit fit_gaussian(const Dataset& data);

}  // namespace limelens
