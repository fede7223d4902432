#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "limelens/models.hpp"
#include "limelens/sampling.hpp"
#include "limelens/theory.hpp"

namespace limelens {

/// Per-coordinate distribution of the repeated beta_hat draws.
struct SummaryStats {
    Eigen::VectorXd median;
    Eigen::VectorXd q1;
    Eigen::VectorXd q3;
};

/// One experiment: the configuration, every repetition's fitted
/// coefficients, the closed-form reference, summaries and scalar metrics
/// (pass flags are 0/1 metrics). Everything except wall_time_seconds is
/// reproducible bit-for-bit from (experiment_id, seed) and is what gets
/// serialized; wall time is reporting-only.
struct ExperimentRecord {
    std::string experiment_id;
    SamplingConfig config;
    int repetitions = 0;
    Eigen::MatrixXd per_rep_beta_hat;  // repetitions x (d+1)
    theory::TheoryReport theory;
    SummaryStats summary_stats;
    std::vector<std::pair<std::string, double>> metrics;
    double wall_time_seconds = 0.0;

    double metric(const std::string& name) const;
};

/// d=10 linear model with f(x) = 10 x_1 - 10 x_2, mu=0, sigma=1, nu=1, p=4,
/// n=1e4, 20 repetitions; xi drawn once from the seed. Metrics compare the
/// median beta_hat against the closed form for that xi.
ExperimentRecord run_fig5(std::uint64_t seed);

/// Same setting, but the bandwidth is set to sqrt(V_crit) of feature 2 (xi
/// is redrawn until that value exists), so the closed form pins beta_2 = 0
/// while feature 1 stays live.
ExperimentRecord run_switch_off(std::uint64_t seed);

/// 100 repetitions; histogram of the surrogate's local error
/// prediction-at-xi minus f(xi), against the closed-form center.
ExperimentRecord run_error_histogram(std::uint64_t seed);

/// Mean |beta_hat - beta| over 10 sub-seeds at n in {1e3, 1e4, 1e5}; the
/// metrics carry the per-n means and the log-log slope.
ExperimentRecord run_convergence(std::uint64_t seed);

enum class ModelKind { linear, kernel_ridge };

/// CSV convenience loader for experiments and the CLI: sniffs a header row
/// by non-numeric cells; the target is target_override if given, else a
/// "target" header column, else the last column.
Dataset load_experiment_dataset(const std::filesystem::path& path,
                                const std::optional<std::string>& target_override = std::nullopt);

/// Fits a model to a CSV (last column = target unless the file provides a
/// "target" header), fits the isotropic sampling Gaussian to its features,
/// picks a seeded data row as xi, and compares 20 explanations at nu=1,
/// n=1e3 against the closed form (exact for linear, gradient-based for
/// kernel ridge).
ExperimentRecord run_dataset_comparison(const std::filesystem::path& data_path, ModelKind kind,
                                        std::uint64_t seed);

/// One bandwidth sample of the closed forms for feature j (beta only when a
/// model is supplied).
struct NuSweepPoint {
    double nu = 0.0;
    double alpha = 0.0;
    double theta = 0.0;
    double beta = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluates alpha_j / theta_j (and beta_j with a model) across a bandwidth
/// grid; base.nu is ignored. This is the machinery behind `sweep-nu`, where
/// theta_j's single sign change brackets sqrt(V_crit).
std::vector<NuSweepPoint> sweep_nu(const SamplingConfig& base, const QuantileGrid& grid,
                                   Eigen::Index j, const std::vector<double>& nus,
                                   const LinearModel* model = nullptr);

/// Writes record.json + record.csv (+ plot.svg when requested) into
/// <out_dir>/<experiment_id>/.
void write_record_files(const ExperimentRecord& record, const std::filesystem::path& out_dir,
                        bool plot);

/// Whole-CLI entry point (subcommands explain / theory / figure / sweep-nu /
/// sample-size). Returns 0 on success, 1 on usage errors, 2 on numerical or
/// degenerate errors.
int cli_main(int argc, const char* const* argv);

}  // namespace limelens
