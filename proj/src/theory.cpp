#include "limelens/theory.hpp"

#include <cmath>
#include <string>

#include "limelens/errors.hpp"
#include "limelens/normal.hpp"

namespace limelens::theory {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

void check_pair(const SamplingConfig& config, const QuantileGrid& grid) {
    config.validate();
    grid.validate();
    if (grid.dim() != config.dim()) {
        throw DimensionMismatch("grid/config dimension mismatch");
    }
}

void check_gradient(const Eigen::VectorXd& gradient, const SamplingConfig& config) {
    if (gradient.size() != config.dim()) {
        throw DimensionMismatch("gradient dimension " + std::to_string(gradient.size()) +
                                " does not match config dimension " +
                                std::to_string(config.dim()));
    }
}

struct BinGeometry {
    double lo;
    double hi;
};

BinGeometry xi_bin(Eigen::Index j, const SamplingConfig& config, const QuantileGrid& grid) {
    const Eigen::VectorXi bins = discretize(config.xi, grid);
    return {grid.lower(j, bins(j)), grid.upper(j, bins(j))};
}

double alpha_from_bin(double lo, double hi, double mu_tilde_j, double sigma_tilde) {
    const double denom = sigma_tilde * M_SQRT2;
    const double ua = std::isinf(lo) ? lo : (lo - mu_tilde_j) / denom;
    const double ub = std::isinf(hi) ? hi : (hi - mu_tilde_j) / denom;
    return half_erf_diff(ua, ub);
}

double theta_from_bin(double lo, double hi, double mu_tilde_j, double sigma_tilde) {
    const double inv_two_st2 = 1.0 / (2.0 * sigma_tilde * sigma_tilde);
    const double ga =
        std::isinf(lo) ? 0.0 : std::exp(-(lo - mu_tilde_j) * (lo - mu_tilde_j) * inv_two_st2);
    const double gb =
        std::isinf(hi) ? 0.0 : std::exp(-(hi - mu_tilde_j) * (hi - mu_tilde_j) * inv_two_st2);
    return sigma_tilde / kSqrt2Pi * (gb - ga);
}

double f_at_mu_tilde(const LinearModel& model, const SamplingConfig& config) {
    const ShrunkParams sp = shrunk_params(config);
    return model.coefficients().dot(sp.mu_tilde) + model.intercept();
}

}  // namespace

ShrunkParams shrunk_params(const SamplingConfig& config) {
    config.validate();
    const double nu2 = config.nu * config.nu;
    const double sigma2 = config.sigma * config.sigma;
    const double sum = nu2 + sigma2;
    ShrunkParams sp;
    sp.mu_tilde = (nu2 * config.mu + sigma2 * config.xi) / sum;
    sp.sigma_tilde = config.nu * config.sigma / std::sqrt(sum);
    const double d = static_cast<double>(config.dim());
    sp.c_d = std::pow(nu2 / sum, d / 2.0) *
             std::exp(-(config.xi - config.mu).squaredNorm() / (2.0 * sum));
    return sp;
}

ShrunkParams shrunk_params(const SamplingConfig& config, const QuantileGrid& grid) {
    ShrunkParams sp = shrunk_params(config);
    const Eigen::VectorXd alphas = alpha_vector(config, grid);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < alphas.size(); ++j) {
        worst = std::max(worst, 1.0 / (alphas(j) * (1.0 - alphas(j))));
    }
    sp.a_d = worst;
    return sp;
}

double alpha(Eigen::Index j, const SamplingConfig& config, const QuantileGrid& grid) {
    check_pair(config, grid);
    const ShrunkParams sp = shrunk_params(config);
    const BinGeometry bin = xi_bin(j, config, grid);
    return alpha_from_bin(bin.lo, bin.hi, sp.mu_tilde(j), sp.sigma_tilde);
}

double theta(Eigen::Index j, const SamplingConfig& config, const QuantileGrid& grid) {
    check_pair(config, grid);
    const ShrunkParams sp = shrunk_params(config);
    const BinGeometry bin = xi_bin(j, config, grid);
    return theta_from_bin(bin.lo, bin.hi, sp.mu_tilde(j), sp.sigma_tilde);
}

Eigen::VectorXd alpha_vector(const SamplingConfig& config, const QuantileGrid& grid) {
    check_pair(config, grid);
    const ShrunkParams sp = shrunk_params(config);
    const Eigen::VectorXi bins = discretize(config.xi, grid);
    Eigen::VectorXd alphas(config.dim());
    for (Eigen::Index j = 0; j < config.dim(); ++j) {
        alphas(j) = alpha_from_bin(grid.lower(j, bins(j)), grid.upper(j, bins(j)),
                                   sp.mu_tilde(j), sp.sigma_tilde);
    }
    return alphas;
}

Eigen::VectorXd theta_vector(const SamplingConfig& config, const QuantileGrid& grid) {
    check_pair(config, grid);
    const ShrunkParams sp = shrunk_params(config);
    const Eigen::VectorXi bins = discretize(config.xi, grid);
    Eigen::VectorXd thetas(config.dim());
    for (Eigen::Index j = 0; j < config.dim(); ++j) {
        thetas(j) = theta_from_bin(grid.lower(j, bins(j)), grid.upper(j, bins(j)),
                                   sp.mu_tilde(j), sp.sigma_tilde);
    }
    return thetas;
}

Eigen::MatrixXd sigma_matrix(const SamplingConfig& config, const QuantileGrid& grid) {
    const Eigen::VectorXd alphas = alpha_vector(config, grid);
    const double c_d = shrunk_params(config).c_d;
    const Eigen::Index d = alphas.size();
    Eigen::MatrixXd sigma(d + 1, d + 1);
    sigma(0, 0) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        sigma(0, j + 1) = alphas(j);
        sigma(j + 1, 0) = alphas(j);
        sigma(j + 1, j + 1) = alphas(j);
        for (Eigen::Index k = j + 1; k < d; ++k) {
            sigma(j + 1, k + 1) = alphas(j) * alphas(k);
            sigma(k + 1, j + 1) = alphas(j) * alphas(k);
        }
    }
    return c_d * sigma;
}

Eigen::MatrixXd sigma_inverse(const SamplingConfig& config, const QuantileGrid& grid) {
    const Eigen::VectorXd alphas = alpha_vector(config, grid);
    const double c_d = shrunk_params(config).c_d;
    const Eigen::Index d = alphas.size();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (alphas(j) < 1e-12 || alphas(j) > 1.0 - 1e-12) {
            throw NearDegenerateBin("alpha_" + std::to_string(j + 1) + " = " +
                                    std::to_string(alphas(j)) +
                                    " is numerically 0 or 1; bandwidth is pathological "
                                    "relative to xi's bin");
        }
    }
    Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(d + 1, d + 1);
    double corner = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double one_minus = 1.0 - alphas(j);
        corner += alphas(j) / one_minus;
        inv(0, j + 1) = -1.0 / one_minus;
        inv(j + 1, 0) = -1.0 / one_minus;
        inv(j + 1, j + 1) = 1.0 / (alphas(j) * one_minus);
    }
    inv(0, 0) = corner;
    return inv / c_d;
}

Eigen::VectorXd gamma_vector(const Eigen::VectorXd& gradient, double f_mu_tilde,
                             const SamplingConfig& config, const QuantileGrid& grid) {
    check_gradient(gradient, config);
    const Eigen::VectorXd alphas = alpha_vector(config, grid);
    const Eigen::VectorXd thetas = theta_vector(config, grid);
    const double c_d = shrunk_params(config).c_d;
    Eigen::VectorXd gamma(config.dim() + 1);
    gamma(0) = f_mu_tilde;
    for (Eigen::Index j = 0; j < config.dim(); ++j) {
        gamma(j + 1) = alphas(j) * f_mu_tilde - gradient(j) * thetas(j);
    }
    return c_d * gamma;
}

Eigen::VectorXd gamma_vector(const LinearModel& model, const SamplingConfig& config,
                             const QuantileGrid& grid) {
    return gamma_vector(model.coefficients(), f_at_mu_tilde(model, config), config, grid);
}

Eigen::VectorXd beta_closed_form(const Eigen::VectorXd& gradient, double f_mu_tilde,
                                 const SamplingConfig& config, const QuantileGrid& grid) {
    check_gradient(gradient, config);
    const Eigen::VectorXd alphas = alpha_vector(config, grid);
    const Eigen::VectorXd thetas = theta_vector(config, grid);
    for (Eigen::Index j = 0; j < alphas.size(); ++j) {
        if (alphas(j) < 1e-12 || alphas(j) > 1.0 - 1e-12) {
            throw NearDegenerateBin("alpha_" + std::to_string(j + 1) +
                                    " is numerically 0 or 1; beta is undefined");
        }
    }
    Eigen::VectorXd beta(config.dim() + 1);
    double intercept = f_mu_tilde;
    for (Eigen::Index j = 0; j < config.dim(); ++j) {
        const double aj_theta = gradient(j) * thetas(j);
        intercept += aj_theta / (1.0 - alphas(j));
        beta(j + 1) = -aj_theta / (alphas(j) * (1.0 - alphas(j)));
    }
    beta(0) = intercept;
    return beta;
}

Eigen::VectorXd beta_closed_form(const LinearModel& model, const SamplingConfig& config,
                                 const QuantileGrid& grid) {
    return beta_closed_form(model.coefficients(), f_at_mu_tilde(model, config), config, grid);
}

double local_error_center(const Eigen::VectorXd& gradient, double f_mu_tilde,
                          const SamplingConfig& config, const QuantileGrid& grid) {
    check_gradient(gradient, config);
    const Eigen::VectorXd alphas = alpha_vector(config, grid);
    const Eigen::VectorXd thetas = theta_vector(config, grid);
    double center = f_mu_tilde;
    for (Eigen::Index j = 0; j < config.dim(); ++j) {
        center -= gradient(j) * thetas(j) / alphas(j);
    }
    return center;
}

double local_error_center(const LinearModel& model, const SamplingConfig& config,
                          const QuantileGrid& grid) {
    return local_error_center(model.coefficients(), f_at_mu_tilde(model, config), config, grid);
}

std::optional<double> v_crit(Eigen::Index j, const SamplingConfig& config,
                             const QuantileGrid& grid) {
    check_pair(config, grid);
    const BinGeometry bin = xi_bin(j, config, grid);
    if (!std::isfinite(bin.lo) || !std::isfinite(bin.hi)) return std::nullopt;
    const double denom = -2.0 * config.mu(j) + bin.lo + bin.hi;
    if (std::abs(denom) < 1e-14) return std::nullopt;
    const double v =
        config.sigma * config.sigma * (2.0 * config.xi(j) - bin.lo - bin.hi) / denom;
    if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
    return v;
}

double sample_size_bound(const LinearModel& model, const SamplingConfig& config,
                         const QuantileGrid& grid, double epsilon, double eta) {
    if (!(epsilon > 0.0)) throw UsageError("epsilon must be positive");
    if (!(eta > 0.0 && eta < 1.0)) throw UsageError("eta must lie in (0,1)");
    const ShrunkParams sp = shrunk_params(config, grid);
    const double d = static_cast<double>(config.dim());
    const double grad2 = model.coefficients().squaredNorm();
    const double sigma2 = config.sigma * config.sigma;
    const double f_mt = f_at_mu_tilde(model, config);
    const double c2 = sp.c_d * sp.c_d;
    const double a2 = sp.a_d * sp.a_d;
    const double eps2 = epsilon * epsilon;

    const double term1 =
        288.0 * grad2 * sigma2 * d * d * a2 / (eps2 * c2) * std::log(12.0 * d / eta);
    const double term2 = 18.0 * d * d * a2 / c2 * std::log(24.0 * d * d / eta);
    const double term3 = 648.0 * std::pow(d, 5) * a2 * a2 *
                         (3.0 * f_mt * f_mt + sp.sigma_tilde * sp.sigma_tilde * grad2) /
                         (c2 * eps2) * std::log(24.0 * d * d / eta);
    return std::ceil(std::max({term1, term2, term3}));
}

double expected_weighted_sqnorm(const SamplingConfig& config) {
    const ShrunkParams sp = shrunk_params(config);
    const double nu2 = config.nu * config.nu;
    const double sigma2 = config.sigma * config.sigma;
    const double sum = nu2 + sigma2;
    const double d = static_cast<double>(config.dim());
    const double bracket = nu2 * nu2 / (sum * sum) * (config.xi - config.mu).squaredNorm() +
                           nu2 * sigma2 * d / sum;
    return sp.c_d * bracket;
}

TheoryReport make_report(const Eigen::VectorXd& gradient, double f_mu_tilde,
                         const SamplingConfig& config, const QuantileGrid& grid) {
    TheoryReport report;
    report.shrunk = shrunk_params(config, grid);
    report.alpha = alpha_vector(config, grid);
    report.theta = theta_vector(config, grid);
    report.sigma_matrix = sigma_matrix(config, grid);
    report.sigma_inverse = sigma_inverse(config, grid);
    report.gamma = gamma_vector(gradient, f_mu_tilde, config, grid);
    report.beta = beta_closed_form(gradient, f_mu_tilde, config, grid);
    report.local_error_center = local_error_center(gradient, f_mu_tilde, config, grid);
    report.v_crit.resize(static_cast<std::size_t>(config.dim()));
    for (Eigen::Index j = 0; j < config.dim(); ++j) {
        report.v_crit[static_cast<std::size_t>(j)] = v_crit(j, config, grid);
    }
    return report;
}

TheoryReport make_report(const LinearModel& model, const SamplingConfig& config,
                         const QuantileGrid& grid) {
    return make_report(model.coefficients(), f_at_mu_tilde(model, config), config, grid);
}

}  // namespace limelens::theory
