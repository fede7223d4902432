#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace limelens {

/// Self-contained SVG boxplot of per-coordinate repetition values with the
/// closed-form reference drawn as a cross. Whiskers extend 1.5 IQR beyond
/// the quartiles; points outside are drawn as dots.
std::string boxplot_svg(const std::string& title, const Eigen::MatrixXd& per_rep_values,
                        const Eigen::VectorXd& reference);

/// Histogram with a vertical marker line.
std::string histogram_svg(const std::string& title, const std::vector<double>& values,
                          int bins, double marker);

/// Log-log scatter with the fitted power-law line.
std::string loglog_svg(const std::string& title, const std::vector<double>& xs,
                       const std::vector<double>& ys, double slope, double intercept);

}  // namespace limelens
