#include "limelens/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "limelens/errors.hpp"
#include "limelens/export.hpp"
#include "limelens/rng.hpp"
#include "limelens/stats.hpp"
#include "limelens/surrogate.hpp"
#include "limelens/svg.hpp"

namespace limelens {

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

LinearModel fig5_model() {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(10);
    a(0) = 10.0;
    a(1) = -10.0;
    return LinearModel(a, 0.0);
}

Eigen::VectorXd draw_xi(std::uint64_t seed, std::uint64_t index, const Eigen::VectorXd& mu,
                        double sigma) {
    Rng rng = stream_rng(seed, streams::kInstance, index);
    Eigen::VectorXd xi(mu.size());
    for (Eigen::Index j = 0; j < mu.size(); ++j) xi(j) = mu(j) + sigma * rng.gaussian();
    return xi;
}

SummaryStats summarize(const Eigen::MatrixXd& reps) {
    SummaryStats stats;
    stats.median.resize(reps.cols());
    stats.q1.resize(reps.cols());
    stats.q3.resize(reps.cols());
    for (Eigen::Index c = 0; c < reps.cols(); ++c) {
        std::vector<double> col(reps.col(c).data(), reps.col(c).data() + reps.rows());
        std::sort(col.begin(), col.end());
        stats.median(c) = quantile_sorted(col, 0.5);
        stats.q1(c) = quantile_sorted(col, 0.25);
        stats.q3(c) = quantile_sorted(col, 0.75);
    }
    return stats;
}

/// Repetition r explains with the sub-seed (seed, repetition, r); order of
/// execution cannot matter because each repetition owns its streams.
Eigen::MatrixXd run_reps(const BlackBoxModel& model, SamplingConfig config,
                         const QuantileGrid& grid, int repetitions, std::uint64_t seed) {
    Eigen::MatrixXd out(repetitions, config.dim() + 1);
    for (int r = 0; r < repetitions; ++r) {
        config.seed = mix_seed(seed, streams::kRepetition, static_cast<std::uint64_t>(r));
        out.row(r) = explain(model, config, grid).beta_hat;
    }
    return out;
}

double max_abs_tail_median(const SummaryStats& stats) {
    double worst = 0.0;
    for (Eigen::Index j = 3; j < stats.median.size(); ++j) {
        worst = std::max(worst, std::abs(stats.median(j)));
    }
    return worst;
}

}  // namespace

double ExperimentRecord::metric(const std::string& name) const {
    for (const auto& [key, value] : metrics) {
        if (key == name) return value;
    }
    throw NumericalError("record is missing metric '" + name + "'");
}

Dataset load_experiment_dataset(const std::filesystem::path& path,
                                const std::optional<std::string>& target_override) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");
    std::string first_line;
    if (!std::getline(in, first_line)) throw UsageError("empty CSV file '" + path.string() + "'");
    in.close();

    std::vector<std::string> cells;
    std::stringstream ss(first_line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);

    bool has_header = false;
    for (const auto& c : cells) {
        try {
            std::size_t used = 0;
            (void)std::stod(c, &used);
            if (used != c.size() && c.find_first_not_of(" \t\r", used) != std::string::npos) {
                has_header = true;
            }
        } catch (const std::exception&) {
            has_header = true;
        }
    }

    std::string target;
    if (target_override) {
        target = *target_override;
    } else if (has_header) {
        target = cells.back();
        for (auto& c : cells) {
            if (c == "target") target = "target";
        }
    } else {
        target = std::to_string(cells.size() - 1);
    }
    return load_dataset(path, has_header, target);
}

ExperimentRecord run_fig5(std::uint64_t seed) {
    const Stopwatch clock;
    const LinearModel model = fig5_model();
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(10);

    SamplingConfig config;
    config.mu = mu;
    config.sigma = 1.0;
    config.nu = 1.0;
    config.p = 4;
    config.n = 10000;
    config.seed = seed;
    config.xi = draw_xi(seed, 0, mu, config.sigma);

    const QuantileGrid grid = theoretical_grid(mu, config.sigma, config.p);

    ExperimentRecord record;
    record.experiment_id = "fig5";
    record.config = config;
    record.repetitions = 20;
    record.per_rep_beta_hat = run_reps(model, config, grid, record.repetitions, seed);
    record.theory = theory::make_report(model, config, grid);
    record.summary_stats = summarize(record.per_rep_beta_hat);

    const double err1 = std::abs(record.summary_stats.median(1) - record.theory.beta(1));
    const double err2 = std::abs(record.summary_stats.median(2) - record.theory.beta(2));
    const double tail = max_abs_tail_median(record.summary_stats);
    record.metrics = {
        {"median_beta1", record.summary_stats.median(1)},
        {"median_beta2", record.summary_stats.median(2)},
        {"theory_beta1", record.theory.beta(1)},
        {"theory_beta2", record.theory.beta(2)},
        {"abs_error_beta1", err1},
        {"abs_error_beta2", err2},
        {"max_abs_tail_median", tail},
        {"pass_beta1_within_1", err1 <= 1.0 ? 1.0 : 0.0},
        {"pass_beta2_within_1", err2 <= 1.0 ? 1.0 : 0.0},
        {"pass_tail_within_0.3", tail <= 0.3 ? 1.0 : 0.0},
        // Published medians for this model at nu=1, n=1e4 — they belong to an
        // instance that is not part of this record's seeded draw, so they are
        // reported for reference, never asserted.
        {"reference_beta1", 11.4},
        {"reference_beta2", -4.1},
    };
    record.wall_time_seconds = clock.seconds();
    return record;
}

ExperimentRecord run_switch_off(std::uint64_t seed) {
    const Stopwatch clock;
    const LinearModel model = fig5_model();
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(10);
    const QuantileGrid grid = theoretical_grid(mu, 1.0, 4);

    SamplingConfig config;
    config.mu = mu;
    config.sigma = 1.0;
    config.nu = 1.0;
    config.p = 4;
    config.n = 10000;
    config.seed = seed;

    // Feature 2 needs a reachable switch-off bandwidth; redraw xi until its
    // bin has one.
    std::optional<double> crit;
    std::uint64_t attempt = 0;
    for (; attempt < 1000; ++attempt) {
        config.xi = draw_xi(seed, attempt, mu, config.sigma);
        crit = theory::v_crit(1, config, grid);
        if (crit) break;
    }
    if (!crit) throw NumericalError("no xi with a defined V_crit for feature 2 in 1000 draws");
    config.nu = std::sqrt(*crit);

    ExperimentRecord record;
    record.experiment_id = "switchoff";
    record.config = config;
    record.repetitions = 20;
    record.per_rep_beta_hat = run_reps(model, config, grid, record.repetitions, seed);
    record.theory = theory::make_report(model, config, grid);
    record.summary_stats = summarize(record.per_rep_beta_hat);

    const double med1 = record.summary_stats.median(1);
    const double med2 = record.summary_stats.median(2);
    record.metrics = {
        {"v_crit_feature2", *crit},
        {"nu", config.nu},
        {"xi_redraws", static_cast<double>(attempt)},
        {"theory_beta2", record.theory.beta(2)},
        {"median_beta1", med1},
        {"median_beta2", med2},
        {"pass_beta2_switched_off", std::abs(med2) <= 0.3 ? 1.0 : 0.0},
        {"pass_beta1_alive", std::abs(med1) >= 5.0 ? 1.0 : 0.0},
    };
    record.wall_time_seconds = clock.seconds();
    return record;
}

ExperimentRecord run_error_histogram(std::uint64_t seed) {
    const Stopwatch clock;
    const LinearModel model = fig5_model();
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(10);

    SamplingConfig config;
    config.mu = mu;
    config.sigma = 1.0;
    config.nu = 1.0;
    config.p = 4;
    config.n = 10000;
    config.seed = seed;
    config.xi = draw_xi(seed, 0, mu, config.sigma);

    const QuantileGrid grid = theoretical_grid(mu, config.sigma, config.p);

    ExperimentRecord record;
    record.experiment_id = "errors";
    record.config = config;
    record.repetitions = 100;
    record.per_rep_beta_hat = run_reps(model, config, grid, record.repetitions, seed);
    record.theory = theory::make_report(model, config, grid);
    record.summary_stats = summarize(record.per_rep_beta_hat);

    const double f_xi = eval(model, config.xi);
    std::vector<double> errors(static_cast<std::size_t>(record.repetitions));
    for (int r = 0; r < record.repetitions; ++r) {
        errors[static_cast<std::size_t>(r)] = record.per_rep_beta_hat.row(r).sum() - f_xi;
    }
    const double center = record.theory.local_error_center - f_xi;
    const double m = mean(errors);
    const double se = std::sqrt(sample_variance(errors) / static_cast<double>(errors.size()));
    record.metrics = {
        {"f_xi", f_xi},
        {"error_mean", m},
        {"error_se", se},
        {"theory_center", center},
        {"pass_mean_within_0.3", std::abs(m - center) <= 0.3 ? 1.0 : 0.0},
        {"pass_center_over_3se", std::abs(center) > 3.0 * se ? 1.0 : 0.0},
    };
    record.wall_time_seconds = clock.seconds();
    return record;
}

ExperimentRecord run_convergence(std::uint64_t seed) {
    const Stopwatch clock;
    const LinearModel model = fig5_model();
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(10);
    const QuantileGrid grid = theoretical_grid(mu, 1.0, 4);
    const std::vector<std::int64_t> sizes = {1000, 10000, 100000};
    constexpr int kSeeds = 10;

    ExperimentRecord record;
    record.experiment_id = "convergence";
    record.repetitions = kSeeds * static_cast<int>(sizes.size());
    record.per_rep_beta_hat.resize(record.repetitions, mu.size() + 1);

    std::vector<double> mean_err(sizes.size(), 0.0);
    int monotone = 0;
    SamplingConfig config;
    config.mu = mu;
    config.sigma = 1.0;
    config.nu = 1.0;
    config.p = 4;

    Eigen::Index row = 0;
    for (int k = 0; k < kSeeds; ++k) {
        const std::uint64_t sub_seed =
            mix_seed(seed, streams::kConvergence, static_cast<std::uint64_t>(k));
        config.xi = draw_xi(sub_seed, 0, mu, config.sigma);
        config.n = sizes.back();
        config.seed = sub_seed;
        const Eigen::VectorXd beta = theory::beta_closed_form(model, config, grid);
        double first_err = 0.0, last_err = 0.0;
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            config.n = sizes[s];
            config.seed = mix_seed(sub_seed, streams::kRepetition, static_cast<std::uint64_t>(s));
            const Explanation fit = explain(model, config, grid);
            record.per_rep_beta_hat.row(row++) = fit.beta_hat;
            const double err = (fit.beta_hat - beta).norm();
            mean_err[s] += err / kSeeds;
            if (s == 0) first_err = err;
            if (s + 1 == sizes.size()) last_err = err;
        }
        if (last_err < first_err) ++monotone;
    }

    // Least-squares line through (log n, log mean error).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto npts = static_cast<double>(sizes.size());
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        const double x = std::log(static_cast<double>(sizes[s]));
        const double y = std::log(mean_err[s]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / npts;

    config.n = sizes.back();
    config.seed = seed;
    config.xi = draw_xi(mix_seed(seed, streams::kConvergence, 0), 0, mu, config.sigma);
    record.config = config;
    record.theory = theory::make_report(model, config, grid);
    record.summary_stats = summarize(record.per_rep_beta_hat);
    record.metrics = {
        {"mean_err_n1e3", mean_err[0]},
        {"mean_err_n1e4", mean_err[1]},
        {"mean_err_n1e5", mean_err[2]},
        {"loglog_slope", slope},
        {"loglog_intercept", intercept},
        {"seeds_monotone", static_cast<double>(monotone)},
        {"pass_slope_half", std::abs(slope + 0.5) <= 0.15 ? 1.0 : 0.0},
    };
    record.wall_time_seconds = clock.seconds();
    return record;
}

void write_record_files(const ExperimentRecord& record, const std::filesystem::path& out_dir,
                        bool plot) {
    const std::filesystem::path dir = out_dir / record.experiment_id;
    std::filesystem::create_directories(dir);
    {
        std::ofstream json(dir / "record.json", std::ios::binary);
        if (!json) throw UsageError("cannot write into '" + dir.string() + "'");
        json << to_json(record) << "\n";
    }
    {
        std::ofstream csv(dir / "record.csv", std::ios::binary);
        csv << record_csv(record);
    }
    if (!plot) return;

    std::string svg;
    if (record.experiment_id == "errors") {
        const double f_xi = record.metric("f_xi");
        std::vector<double> errors;
        errors.reserve(static_cast<std::size_t>(record.per_rep_beta_hat.rows()));
        for (Eigen::Index r = 0; r < record.per_rep_beta_hat.rows(); ++r) {
            errors.push_back(record.per_rep_beta_hat.row(r).sum() - f_xi);
        }
        svg = histogram_svg("surrogate local error at xi", errors, 20,
                            record.metric("theory_center"));
    } else if (record.experiment_id == "convergence") {
        svg = loglog_svg("mean |beta_hat - beta| vs n", {1e3, 1e4, 1e5},
                         {record.metric("mean_err_n1e3"), record.metric("mean_err_n1e4"),
                          record.metric("mean_err_n1e5")},
                         record.metric("loglog_slope"), record.metric("loglog_intercept"));
    } else {
        svg = boxplot_svg(record.experiment_id + ": beta_hat by coordinate",
                          record.per_rep_beta_hat, record.theory.beta);
    }
    std::ofstream out(dir / "plot.svg", std::ios::binary);
    out << svg;
}

std::vector<NuSweepPoint> sweep_nu(const SamplingConfig& base, const QuantileGrid& grid,
                                   Eigen::Index j, const std::vector<double>& nus,
                                   const LinearModel* model) {
    if (j < 0 || j >= base.dim()) throw UsageError("sweep feature index out of range");
    std::vector<NuSweepPoint> points;
    points.reserve(nus.size());
    SamplingConfig config = base;
    for (double nu : nus) {
        if (!(nu > 0.0)) throw UsageError("sweep bandwidths must be positive");
        config.nu = nu;
        NuSweepPoint pt;
        pt.nu = nu;
        pt.alpha = theory::alpha(j, config, grid);
        pt.theta = theory::theta(j, config, grid);
        if (model) pt.beta = theory::beta_closed_form(*model, config, grid)(j + 1);
        points.push_back(pt);
    }
    return points;
}

ExperimentRecord run_dataset_comparison(const std::filesystem::path& data_path, ModelKind kind,
                                        std::uint64_t seed) {
    const Stopwatch clock;
    Dataset data = load_experiment_dataset(data_path);
    data.validate();
    if (!data.targets) throw UsageError("dataset experiment needs a target column");
    const GaussianFit fit = fit_gaussian(data);

    SamplingConfig config;
    config.mu = fit.mu;
    config.sigma = fit.sigma;
    config.nu = 1.0;
    config.p = 4;
    config.n = 1000;
    config.seed = seed;
    const Eigen::Index pick =
        stream_rng(seed, streams::kInstance, 0).uniform_int(static_cast<int>(data.size())) - 1;
    config.xi = data.rows.row(pick).transpose();

    const QuantileGrid grid = theoretical_grid(fit.mu, fit.sigma, config.p);

    ExperimentRecord record;
    record.config = config;
    record.repetitions = 20;

    if (kind == ModelKind::linear) {
        record.experiment_id = "dataset-linear";
        const LinearModel model = fit_linear(data);
        record.per_rep_beta_hat = run_reps(model, config, grid, record.repetitions, seed);
        record.theory = theory::make_report(model, config, grid);
        record.summary_stats = summarize(record.per_rep_beta_hat);

        double worst_ratio = 0.0;
        for (Eigen::Index j = 1; j < record.theory.beta.size(); ++j) {
            const double iqr =
                std::max(record.summary_stats.q3(j) - record.summary_stats.q1(j), 1e-9);
            const double gap = std::abs(record.summary_stats.median(j) - record.theory.beta(j));
            worst_ratio = std::max(worst_ratio, gap / iqr);
        }
        record.metrics = {
            {"picked_row", static_cast<double>(pick)},
            {"max_gap_over_iqr", worst_ratio},
            {"pass_medians_within_4iqr", worst_ratio <= 4.0 ? 1.0 : 0.0},
        };
    } else {
        record.experiment_id = "dataset-kernel_ridge";
        const KernelRidgeModel model = train_kernel_ridge(data, 5.0, 1.0);
        record.per_rep_beta_hat = run_reps(model, config, grid, record.repetitions, seed);
        const Eigen::VectorXd gradient = finite_diff_gradient(model, config.xi);
        const double f_mu_tilde = eval(model, theory::shrunk_params(config).mu_tilde);
        record.theory = theory::make_report(gradient, f_mu_tilde, config, grid);
        record.summary_stats = summarize(record.per_rep_beta_hat);

        int considered = 0;
        int agree = 0;
        for (Eigen::Index j = 1; j < record.theory.beta.size(); ++j) {
            if (std::abs(record.theory.beta(j)) > 0.5) {
                ++considered;
                if (record.theory.beta(j) * record.summary_stats.median(j) > 0.0) ++agree;
            }
        }
        record.metrics = {
            {"picked_row", static_cast<double>(pick)},
            {"sign_considered", static_cast<double>(considered)},
            {"sign_agree", static_cast<double>(agree)},
            {"pass_sign_agreement", considered == agree ? 1.0 : 0.0},
        };
    }
    record.wall_time_seconds = clock.seconds();
    return record;
}

}  // namespace limelens
