#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "limelens/errors.hpp"
#include "limelens/export.hpp"
#include "limelens/harness.hpp"
#include "limelens/surrogate.hpp"
#include "limelens/theory.hpp"

namespace limelens {

namespace {

struct ConfigFlags {
    std::vector<double> xi;
    std::vector<double> mu;
    double sigma = 1.0;
    double nu = 1.0;
    double ridge = 0.0;
    int bins = 4;
    std::int64_t samples = 5000;
    std::uint64_t seed = 46;
};

struct ModelFlags {
    std::vector<double> a;
    double b = 0.0;
    std::string data;
    std::string target;
    std::string kind = "linear";
    double kernel_scale = 5.0;
    double kernel_ridge = 1.0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags, bool xi_required) {
    auto* xi = cmd->add_option("--xi", flags.xi, "instance to explain, comma-separated")
                   ->delimiter(',');
    if (xi_required) xi->required();
    cmd->add_option("--mu", flags.mu, "sampling Gaussian mean (default: zeros)")->delimiter(',');
    cmd->add_option("--sigma", flags.sigma, "sampling Gaussian scale");
    cmd->add_option("--nu", flags.nu, "weight bandwidth");
    cmd->add_option("--bins", flags.bins, "quantile bins per feature");
    cmd->add_option("--samples", flags.samples, "number of perturbations");
    cmd->add_option("--seed", flags.seed, "RNG seed");
}

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--a", flags.a, "linear model coefficients, comma-separated")
        ->delimiter(',');
    cmd->add_option("--b", flags.b, "linear model intercept");
    cmd->add_option("--data", flags.data, "CSV to fit a model / Gaussian from");
    cmd->add_option("--target", flags.target, "target column (name or 0-based index)");
    cmd->add_option("--model", flags.kind, "model kind when fitting from --data")
        ->check(CLI::IsMember({"linear", "kernel_ridge"}));
    cmd->add_option("--kernel-scale", flags.kernel_scale, "Gaussian kernel scale");
    cmd->add_option("--kernel-ridge", flags.kernel_ridge, "kernel ridge regularization");
}

SamplingConfig build_config(const ConfigFlags& flags) {
    SamplingConfig config;
    config.xi = Eigen::Map<const Eigen::VectorXd>(flags.xi.data(),
                                                  static_cast<Eigen::Index>(flags.xi.size()));
    if (flags.mu.empty()) {
        config.mu = Eigen::VectorXd::Zero(config.xi.size());
    } else {
        config.mu = Eigen::Map<const Eigen::VectorXd>(flags.mu.data(),
                                                      static_cast<Eigen::Index>(flags.mu.size()));
    }
    config.sigma = flags.sigma;
    config.nu = flags.nu;
    config.p = flags.bins;
    config.n = flags.samples;
    config.seed = flags.seed;
    config.validate();
    return config;
}

LinearModel linear_from_flags(const ModelFlags& flags, Eigen::Index d) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
    if (!flags.a.empty()) {
        if (static_cast<Eigen::Index>(flags.a.size()) != d) {
            throw UsageError("--a must have the same dimension as --xi");
        }
        a = Eigen::Map<const Eigen::VectorXd>(flags.a.data(), d);
    }
    return LinearModel(a, flags.b);
}

std::optional<std::string> target_of(const ModelFlags& flags) {
    if (flags.target.empty()) return std::nullopt;
    return flags.target;
}

void emit(const std::string& text, const std::string& out_dir, const std::string& filename) {
    if (out_dir.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    out << text;
    std::cerr << "wrote " << path.string() << "\n";
}

void run_explain(const ConfigFlags& cfg_flags, const ModelFlags& model_flags, double ridge,
                 const std::string& grid_kind, const std::string& out_dir,
                 const std::string& format, const std::string& perturbations_file,
                 bool sigma_given) {
    SamplingConfig config = build_config(cfg_flags);

    std::unique_ptr<BlackBoxModel> model;
    std::optional<Dataset> data;
    if (!model_flags.data.empty()) {
        data = load_experiment_dataset(model_flags.data, target_of(model_flags));
        data->validate();
        if (data->dim() != config.dim()) {
            throw UsageError("--xi dimension does not match the dataset's feature count");
        }
        if (model_flags.kind == "kernel_ridge") {
            model = std::make_unique<KernelRidgeModel>(
                train_kernel_ridge(*data, model_flags.kernel_scale, model_flags.kernel_ridge));
        } else {
            model = std::make_unique<LinearModel>(fit_linear(*data));
        }
        if (cfg_flags.mu.empty() || !sigma_given) {
            const GaussianFit fit = fit_gaussian(*data);
            if (cfg_flags.mu.empty()) config.mu = fit.mu;
            if (!sigma_given) config.sigma = fit.sigma;
        }
    } else {
        if (model_flags.a.empty()) {
            throw UsageError("explain needs a model: pass --a (and --b) or --data");
        }
        model = std::make_unique<LinearModel>(linear_from_flags(model_flags, config.dim()));
    }

    QuantileGrid grid;
    if (grid_kind == "empirical") {
        if (!data) throw UsageError("--grid empirical requires --data");
        grid = empirical_grid(*data, config.p);
    } else {
        grid = theoretical_grid(config.mu, config.sigma, config.p);
    }

    const Explanation result = explain(*model, config, grid, ridge);
    emit(format == "csv" ? to_csv(result) : to_json(result) + "\n", out_dir,
         format == "csv" ? "explanation.csv" : "explanation.json");

    if (!perturbations_file.empty()) {
        std::ofstream out(perturbations_file, std::ios::binary);
        if (!out) throw UsageError("cannot write '" + perturbations_file + "'");
        write_perturbations_csv(out, perturb(config, grid));
        std::cerr << "wrote " << perturbations_file << "\n";
    }
}

void run_theory(const ConfigFlags& cfg_flags, const ModelFlags& model_flags,
                const std::string& out_dir, const std::string& format) {
    const SamplingConfig config = build_config(cfg_flags);
    const LinearModel model = linear_from_flags(model_flags, config.dim());
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    const theory::TheoryReport report = theory::make_report(model, config, grid);
    emit(format == "csv" ? to_csv(report) : to_json(report, config) + "\n", out_dir,
         format == "csv" ? "theory.csv" : "theory.json");
}

void run_figure(const std::string& which, std::uint64_t seed, const ModelFlags& model_flags,
                const std::string& out_dir, const std::string& format, bool plot) {
    ExperimentRecord record;
    if (which == "fig5") {
        record = run_fig5(seed);
    } else if (which == "switchoff") {
        record = run_switch_off(seed);
    } else if (which == "errors") {
        record = run_error_histogram(seed);
    } else if (which == "convergence") {
        record = run_convergence(seed);
    } else if (which == "dataset") {
        if (model_flags.data.empty()) throw UsageError("figure dataset requires --data");
        const ModelKind kind = model_flags.kind == "kernel_ridge" ? ModelKind::kernel_ridge
                                                                  : ModelKind::linear;
        record = run_dataset_comparison(model_flags.data, kind, seed);
    } else {
        throw UsageError("unknown figure '" + which + "'");
    }

    if (out_dir.empty()) {
        std::cout << (format == "csv" ? record_csv(record) : to_json(record) + "\n");
    } else {
        write_record_files(record, out_dir, plot);
        std::cerr << "wrote " << (std::filesystem::path(out_dir) / record.experiment_id).string()
                  << " (" << format_real(record.wall_time_seconds) << " s)\n";
    }
}

void run_sweep(const ConfigFlags& cfg_flags, const ModelFlags& model_flags, int feature,
               double nu_min, double nu_max, int steps, const std::string& out_dir) {
    ConfigFlags base_flags = cfg_flags;
    base_flags.nu = 1.0;
    const SamplingConfig config = build_config(base_flags);
    if (feature < 1 || feature > config.dim()) {
        throw UsageError("--feature must be between 1 and the dimension");
    }
    if (!(nu_min > 0.0) || !(nu_max > nu_min) || steps < 2) {
        throw UsageError("need 0 < --nu-min < --nu-max and --steps >= 2");
    }
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);

    std::vector<double> nus(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) {
        nus[static_cast<std::size_t>(s)] = nu_min + (nu_max - nu_min) * s / (steps - 1);
    }
    std::optional<LinearModel> model;
    if (!model_flags.a.empty()) model = linear_from_flags(model_flags, config.dim());
    const auto points =
        sweep_nu(config, grid, feature - 1, nus, model ? &*model : nullptr);

    std::string out = model ? "nu,alpha,theta,beta\n" : "nu,alpha,theta\n";
    for (const auto& pt : points) {
        out += format_real(pt.nu) + "," + format_real(pt.alpha) + "," + format_real(pt.theta);
        if (model) out += "," + format_real(pt.beta);
        out += "\n";
    }
    emit(out, out_dir, "sweep_nu.csv");

    if (const auto crit = theory::v_crit(feature - 1, config, grid)) {
        std::cerr << "v_crit(feature " << feature << ") = " << format_real(*crit)
                  << ", switch-off bandwidth " << format_real(std::sqrt(*crit)) << "\n";
    } else {
        std::cerr << "v_crit(feature " << feature << ") undefined\n";
    }
}

void run_sample_size(const ConfigFlags& cfg_flags, const ModelFlags& model_flags, double epsilon,
                     double eta) {
    const SamplingConfig config = build_config(cfg_flags);
    const LinearModel model = linear_from_flags(model_flags, config.dim());
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    const double bound = theory::sample_size_bound(model, config, grid, epsilon, eta);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.0f\n", bound);
    std::cout << buf;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"TabularLIME for regression, with closed-form expected explanations"};
    app.set_version_flag("--version", "limelens 0.1.0");
    app.require_subcommand(1);

    ConfigFlags cfg;
    ModelFlags mdl;
    std::string out_dir;
    std::string format = "json";
    std::string grid_kind = "theoretical";
    std::string perturbations_file;
    std::string figure_which;
    bool plot = true;
    int feature = 1;
    double nu_min = 0.05, nu_max = 3.0;
    int steps = 120;
    double epsilon = 1.0, eta = 0.1;

    auto* explain_cmd = app.add_subcommand("explain", "sample around xi and fit the surrogate");
    add_config_flags(explain_cmd, cfg, true);
    add_model_flags(explain_cmd, mdl);
    explain_cmd->add_option("--ridge", cfg.ridge, "ridge strength (0 = plain WLS)");
    explain_cmd->add_option("--grid", grid_kind, "quantile grid source")
        ->check(CLI::IsMember({"theoretical", "empirical"}));
    explain_cmd->add_option("--out", out_dir, "output directory");
    explain_cmd->add_option("--format", format, "stdout/file format")
        ->check(CLI::IsMember({"json", "csv"}));
    explain_cmd->add_option("--perturbations", perturbations_file,
                            "also dump the perturbation set as CSV");
    explain_cmd->callback([&] {
        run_explain(cfg, mdl, cfg.ridge, grid_kind, out_dir, format, perturbations_file,
                    explain_cmd->count("--sigma") > 0);
    });

    auto* theory_cmd = app.add_subcommand("theory", "closed-form expected explanation");
    add_config_flags(theory_cmd, cfg, true);
    add_model_flags(theory_cmd, mdl);
    theory_cmd->add_option("--out", out_dir, "output directory");
    theory_cmd->add_option("--format", format, "stdout/file format")
        ->check(CLI::IsMember({"json", "csv"}));
    theory_cmd->callback([&] { run_theory(cfg, mdl, out_dir, format); });

    auto* figure_cmd = app.add_subcommand("figure", "run a canned experiment");
    figure_cmd->add_option("which", figure_which, "experiment id")
        ->required()
        ->check(CLI::IsMember({"fig5", "switchoff", "errors", "convergence", "dataset"}));
    figure_cmd->add_option("--seed", cfg.seed, "experiment seed");
    add_model_flags(figure_cmd, mdl);
    figure_cmd->add_option("--out", out_dir, "output directory (record.json/record.csv)");
    figure_cmd->add_option("--format", format, "stdout format when no --out")
        ->check(CLI::IsMember({"json", "csv"}));
    figure_cmd->add_flag("--plot,!--no-plot", plot, "write plot.svg next to the record");
    figure_cmd->callback([&] { run_figure(figure_which, cfg.seed, mdl, out_dir, format, plot); });

    auto* sweep_cmd = app.add_subcommand("sweep-nu", "alpha/theta/beta across bandwidths");
    add_config_flags(sweep_cmd, cfg, true);
    add_model_flags(sweep_cmd, mdl);
    sweep_cmd->add_option("--feature", feature, "1-based feature index")->required();
    sweep_cmd->add_option("--nu-min", nu_min, "smallest bandwidth");
    sweep_cmd->add_option("--nu-max", nu_max, "largest bandwidth");
    sweep_cmd->add_option("--steps", steps, "grid size");
    sweep_cmd->add_option("--out", out_dir, "output directory");
    sweep_cmd->callback([&] { run_sweep(cfg, mdl, feature, nu_min, nu_max, steps, out_dir); });

    auto* size_cmd = app.add_subcommand("sample-size", "concentration-bound sample count");
    add_config_flags(size_cmd, cfg, true);
    add_model_flags(size_cmd, mdl);
    size_cmd->add_option("--epsilon", epsilon, "target accuracy")->required();
    size_cmd->add_option("--eta", eta, "failure probability")->required();
    size_cmd->callback([&] { run_sample_size(cfg, mdl, epsilon, eta); });

    try {
        app.parse(argc, argv);
        std::cout.flush();
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace limelens
