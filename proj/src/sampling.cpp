#include "limelens/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "limelens/errors.hpp"
#include "limelens/normal.hpp"
#include "limelens/parallel.hpp"
#include "limelens/stats.hpp"

namespace limelens {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

int discretize_coord(double x, const QuantileGrid& grid, Eigen::Index j) {
    if (std::isnan(x)) throw UsageError("cannot discretize NaN");
    // First boundary strictly greater than x; outer +inf guarantees a hit
    // and puts boundary ties into the upper bin.
    int lo = 1;
    int hi = grid.p;  // boundary index range [1, p]; bin = first k with x < q_{j,k}
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (x < grid.boundaries(j, mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

// Standard normal truncated to (a, b], a < b, via inverse CDF. A box in the
// right tail is mirrored into the left one so the CDF difference never
// cancels against 1.
double std_trunc_gaussian(double a, double b, Rng& rng) {
    const bool mirrored = (a >= 0.0);
    if (mirrored) {
        const double old_a = a;
        a = -b;
        b = -old_a;
    }
    const double fa = normal_cdf(a);
    const double fb = normal_cdf(b);
    const double mass = fb - fa;
    double x;
    if (mass > 1e-300) {
        x = normal_quantile(fa + rng.uniform_open() * mass);
    } else {
        // Far-tail box: the inverse-CDF path has no mass left to invert.
        x = std::numeric_limits<double>::quiet_NaN();
        for (int attempt = 0; attempt < 1000 && std::isnan(x); ++attempt) {
            const double draw = rng.gaussian();
            if (draw > a && draw <= b) x = draw;
        }
        if (std::isnan(x)) {
            throw NumericalError("truncated Gaussian bin has vanishing mass (lo=" +
                                 std::to_string(a) + ", hi=" + std::to_string(b) + ")");
        }
    }
    if (mirrored) {
        const double old_a = a;
        a = -b;
        b = -old_a;
        x = -x;
    }
    // Clamp rounding spill back into (a, b].
    if (!(x > a)) x = std::nextafter(a, kInf);
    if (x > b) x = b;
    return x;
}

}  // namespace

void QuantileGrid::validate() const {
    if (p < 1 || boundaries.cols() != p + 1) {
        throw UsageError("quantile grid must have p+1 boundary columns");
    }
    for (Eigen::Index j = 0; j < boundaries.rows(); ++j) {
        if (boundaries(j, 0) != -kInf || boundaries(j, p) != kInf) {
            throw UsageError("outer grid boundaries must be -inf and +inf");
        }
        for (int k = 1; k < p; ++k) {
            if (!std::isfinite(boundaries(j, k))) {
                throw UsageError("interior grid boundary is not finite");
            }
            if (k + 1 < p && !(boundaries(j, k) < boundaries(j, k + 1))) {
                throw CollapsedBins("grid row " + std::to_string(j + 1) +
                                    " is not strictly increasing at boundary " +
                                    std::to_string(k));
            }
        }
    }
}

void SamplingConfig::validate() const {
    if (xi.size() == 0 || xi.size() != mu.size()) {
        throw DimensionMismatch("xi and mu must have the same nonzero dimension");
    }
    if (!(sigma > 0.0)) throw UsageError("sigma must be positive");
    if (!(nu > 0.0)) throw UsageError("nu must be positive");
    if (p < 2) throw UsageError("bin count p must be at least 2");
    if (n < 1) throw UsageError("sample count n must be at least 1");
}

QuantileGrid theoretical_grid(const Eigen::VectorXd& mu, double sigma, int p) {
    if (p < 2) throw UsageError("theoretical grid needs p >= 2");
    if (!(sigma > 0.0)) throw UsageError("sigma must be positive");
    QuantileGrid grid;
    grid.p = p;
    grid.source = QuantileGrid::Source::theoretical;
    grid.boundaries.resize(mu.size(), p + 1);
    grid.boundaries.col(0).setConstant(-kInf);
    grid.boundaries.col(p).setConstant(kInf);
    for (int k = 1; k < p; ++k) {
        const double z = normal_quantile(static_cast<double>(k) / p);
        for (Eigen::Index j = 0; j < mu.size(); ++j) {
            grid.boundaries(j, k) = mu(j) + sigma * z;
        }
    }
    return grid;
}

QuantileGrid empirical_grid(const Dataset& data, int p) {
    if (p < 2) throw UsageError("empirical grid needs p >= 2");
    if (data.rows.rows() < p) {
        throw UsageError("empirical grid needs at least p rows (" + std::to_string(p) + ")");
    }
    QuantileGrid grid;
    grid.p = p;
    grid.source = QuantileGrid::Source::empirical;
    grid.boundaries.resize(data.rows.cols(), p + 1);
    grid.boundaries.col(0).setConstant(-kInf);
    grid.boundaries.col(p).setConstant(kInf);
    for (Eigen::Index j = 0; j < data.rows.cols(); ++j) {
        std::vector<double> col(data.rows.col(j).data(), data.rows.col(j).data() + data.rows.rows());
        std::sort(col.begin(), col.end());
        for (int k = 1; k < p; ++k) {
            grid.boundaries(j, k) = quantile_sorted(col, static_cast<double>(k) / p);
        }
        for (int k = 1; k + 1 < p; ++k) {
            if (!(grid.boundaries(j, k) < grid.boundaries(j, k + 1))) {
                throw CollapsedBins("feature " + std::to_string(j + 1) +
                                    ": empirical quantiles collapse, fewer than " +
                                    std::to_string(p) + " distinct boxes");
            }
        }
    }
    return grid;
}

Eigen::VectorXi discretize(const Eigen::VectorXd& x, const QuantileGrid& grid) {
    if (x.size() != grid.dim()) {
        throw DimensionMismatch("discretize: vector dimension " + std::to_string(x.size()) +
                                " does not match grid dimension " + std::to_string(grid.dim()));
    }
    Eigen::VectorXi bins(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) bins(j) = discretize_coord(x(j), grid, j);
    return bins;
}

Eigen::MatrixXi sample_bins(std::int64_t n, Eigen::Index d, int p, std::uint64_t seed) {
    if (n < 0 || d < 1 || p < 1) throw UsageError("sample_bins: need n >= 0, d >= 1, p >= 1");
    Eigen::MatrixXi bins(n, d);
    parallel_chunks(n, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            Rng rng = stream_rng(seed, streams::kBins, static_cast<std::uint64_t>(i));
            for (Eigen::Index j = 0; j < d; ++j) bins(i, j) = rng.uniform_int(p);
        }
    });
    return bins;
}

double sample_truncated_gaussian(double mu_j, double sigma, double lo, double hi, Rng& rng) {
    if (!(lo < hi)) throw UsageError("truncation interval requires lo < hi");
    if (!(sigma > 0.0)) throw UsageError("sigma must be positive");
    const double a = (lo - mu_j) / sigma;
    const double b = (hi - mu_j) / sigma;
    double x = mu_j + sigma * std_trunc_gaussian(a, b, rng);
    if (!(x > lo)) x = std::nextafter(lo, kInf);
    if (x > hi) x = hi;
    return x;
}

PerturbationSet perturb(const SamplingConfig& config, const QuantileGrid& grid) {
    config.validate();
    grid.validate();
    if (grid.dim() != config.dim()) {
        throw DimensionMismatch("grid dimension " + std::to_string(grid.dim()) +
                                " does not match config dimension " +
                                std::to_string(config.dim()));
    }
    if (grid.p != config.p) {
        throw DimensionMismatch("grid has " + std::to_string(grid.p) + " bins, config wants " +
                                std::to_string(config.p));
    }

    const std::int64_t n = config.n;
    const Eigen::Index d = config.dim();
    const Eigen::VectorXi xi_bins = discretize(config.xi, grid);

    PerturbationSet set;
    set.bins = sample_bins(n, d, config.p, config.seed);
    set.samples.resize(n, d);
    set.features.resize(n, d);
    set.weights.resize(n);

    const double inv_two_nu2 = 1.0 / (2.0 * config.nu * config.nu);
    parallel_chunks(n, [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            Rng rng = stream_rng(config.seed, streams::kUndiscretize,
                                 static_cast<std::uint64_t>(i));
            double sqdist = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                const int bin = set.bins(i, j);
                const double x = sample_truncated_gaussian(
                    config.mu(j), config.sigma, grid.lower(j, bin), grid.upper(j, bin), rng);
                set.samples(i, j) = x;
                set.features(i, j) = (bin == xi_bins(j)) ? 1 : 0;
                const double diff = x - config.xi(j);
                sqdist += diff * diff;
            }
            // Clamped to the smallest normal so weights stay inside (0, 1]
            // even when the exponent underflows.
            set.weights(i) = std::max(std::exp(-sqdist * inv_two_nu2),
                                      std::numeric_limits<double>::min());
        }
    });
    return set;
}

}  // namespace limelens
