#include "limelens/stats.hpp"

#include <algorithm>
#include <cmath>

#include "limelens/errors.hpp"

namespace limelens {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw UsageError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw UsageError("quantile level must lie in [0,1]");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - std::floor(h);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

double mean(const std::vector<double>& values) {
    if (values.empty()) throw UsageError("mean of an empty sample");
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
    if (values.size() < 2) throw UsageError("variance needs at least two values");
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(values.size() - 1);
}

}  // namespace limelens
