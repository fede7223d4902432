#pragma once

#include <vector>

namespace limelens {

/// q-quantile of a sorted sample by linear interpolation between order
/// statistics (the h = (m-1)q convention).
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Convenience: copies, sorts, interpolates.
double quantile(std::vector<double> values, double q);

double mean(const std::vector<double>& values);
double sample_variance(const std::vector<double>& values);

}  // namespace limelens
