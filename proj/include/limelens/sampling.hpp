#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "limelens/models.hpp"
#include "limelens/rng.hpp"

namespace limelens {

/// Per-feature monotone bin boundaries. Row j holds q_{j,0} .. q_{j,p} with
/// q_{j,0} = -inf and q_{j,p} = +inf, so every real number lands in exactly
/// one of the p boxes. Bin k covers [q_{j,k-1}, q_{j,k}) — ties go up.
struct QuantileGrid {
    enum class Source { theoretical, empirical };

    Eigen::MatrixXd boundaries;  // d x (p+1)
    int p = 0;
    Source source = Source::theoretical;

    Eigen::Index dim() const { return boundaries.rows(); }
    double lower(Eigen::Index j, int bin) const { return boundaries(j, bin - 1); }
    double upper(Eigen::Index j, int bin) const { return boundaries(j, bin); }
    /// Outer boundaries infinite, interior strictly increasing.
    void validate() const;
};

/// Everything one perturbation run needs: the instance xi, the Gaussian
/// sampling parameters, the weight bandwidth, bin and sample counts, seed.
struct SamplingConfig {
    Eigen::VectorXd xi;
    Eigen::VectorXd mu;
    double sigma = 1.0;
    double nu = 1.0;
    int p = 4;
    std::int64_t n = 1000;
    std::uint64_t seed = 0;

    Eigen::Index dim() const { return xi.size(); }
    void validate() const;
};

/// One batch of perturbations: sampled bins y, raw samples x, binary
/// same-bin-as-xi features z, exponential weights pi.
struct PerturbationSet {
    Eigen::MatrixXi bins;      // n x d, entries in 1..p
    Eigen::MatrixXd samples;   // n x d
    Eigen::MatrixXi features;  // n x d, 0/1
    Eigen::VectorXd weights;   // n, in (0, 1]
};

/// Gaussian quantile grid: q_{j,k} = mu_j + sigma * Phi^{-1}(k/p) for the
/// interior boundaries. Rows are identical up to the shift mu_j.
QuantileGrid theoretical_grid(const Eigen::VectorXd& mu, double sigma, int p);

/// Empirical k/p-quantiles per feature (linear-interpolation convention)
/// as interior boundaries; outer boundaries +-inf. Duplicate quantiles are
/// rejected: the downstream theory needs p distinct boxes per feature.
QuantileGrid empirical_grid(const Dataset& data, int p);

/// Bin index per coordinate: the k with q_{j,k-1} <= x_j < q_{j,k}.
Eigen::VectorXi discretize(const Eigen::VectorXd& x, const QuantileGrid& grid);

/// n x d bin indices, i.i.d. uniform on {1..p}. Row i draws from the
/// sub-stream (seed, row i), so output does not depend on scheduling.
Eigen::MatrixXi sample_bins(std::int64_t n, Eigen::Index d, int p, std::uint64_t seed);

/// One draw of N(mu_j, sigma^2) conditioned on (lo, hi], by inverse CDF.
/// Falls back to bounded rejection if the bin mass underflows (~1e-300).
double sample_truncated_gaussian(double mu_j, double sigma, double lo, double hi, Rng& rng);

/// Lines 3-11 of the sampling loop: draw bins, un-discretize each
/// coordinate with the matching truncated Gaussian, flag coordinates that
/// share xi's bin, weight each row by exp(-|x_i - xi|^2 / (2 nu^2)).
PerturbationSet perturb(const SamplingConfig& config, const QuantileGrid& grid);

}  // namespace limelens
