#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <memory>
#include <optional>

#include "limelens/errors.hpp"
#include "limelens/export.hpp"
#include "limelens/harness.hpp"
#include "limelens/integrals.hpp"
#include "limelens/models.hpp"
#include "limelens/sampling.hpp"
#include "limelens/surrogate.hpp"
#include "limelens/theory.hpp"

namespace py = pybind11;
using namespace limelens;

namespace {

Dataset make_dataset(const Eigen::MatrixXd& rows,
                     const std::optional<Eigen::VectorXd>& targets,
                     const std::optional<std::vector<std::string>>& feature_names) {
    Dataset data;
    data.rows = rows;
    data.targets = targets;
    if (feature_names) {
        data.feature_names = *feature_names;
    } else {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            data.feature_names.push_back("x" + std::to_string(j + 1));
        }
    }
    data.validate();
    return data;
}

std::map<std::string, double> metrics_dict(const ExperimentRecord& record) {
    return {record.metrics.begin(), record.metrics.end()};
}

}  // namespace

PYBIND11_MODULE(_limelens, m) {
    m.doc() = "TabularLIME for regression with closed-form expected explanations";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

    py::class_<BlackBoxModel, std::shared_ptr<BlackBoxModel>>(m, "BlackBoxModel")
        .def("dim", &BlackBoxModel::dim)
        .def("__call__", [](const BlackBoxModel& self, const Eigen::VectorXd& x) {
            return eval(self, x);
        });

    py::class_<LinearModel, BlackBoxModel, std::shared_ptr<LinearModel>>(m, "LinearModel")
        .def(py::init<Eigen::VectorXd, double>(), py::arg("a"), py::arg("b") = 0.0)
        .def_property_readonly("a", &LinearModel::coefficients)
        .def_property_readonly("b", &LinearModel::intercept);

    py::class_<KernelRidgeModel, BlackBoxModel, std::shared_ptr<KernelRidgeModel>>(
        m, "KernelRidgeModel")
        .def_property_readonly("dual_coeffs", &KernelRidgeModel::dual_coeffs)
        .def_property_readonly("kernel_scale", &KernelRidgeModel::kernel_scale)
        .def_property_readonly("ridge", &KernelRidgeModel::ridge);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&make_dataset), py::arg("rows"), py::arg("targets") = std::nullopt,
             py::arg("feature_names") = std::nullopt)
        .def_readonly("rows", &Dataset::rows)
        .def_readonly("targets", &Dataset::targets)
        .def_readonly("feature_names", &Dataset::feature_names);

    py::class_<GaussianFit>(m, "GaussianFit")
        .def_readonly("mu", &GaussianFit::mu)
        .def_readonly("sigma", &GaussianFit::sigma)
        .def_readonly("per_feature_sigma", &GaussianFit::per_feature_sigma);

    py::class_<SamplingConfig>(m, "SamplingConfig")
        .def(py::init([](const Eigen::VectorXd& xi, const Eigen::VectorXd& mu, double sigma,
                         double nu, int bins, std::int64_t samples, std::uint64_t seed) {
                 SamplingConfig config;
                 config.xi = xi;
                 config.mu = mu;
                 config.sigma = sigma;
                 config.nu = nu;
                 config.p = bins;
                 config.n = samples;
                 config.seed = seed;
                 config.validate();
                 return config;
             }),
             py::arg("xi"), py::arg("mu"), py::arg("sigma") = 1.0, py::arg("nu") = 1.0,
             py::arg("bins") = 4, py::arg("samples") = 5000, py::arg("seed") = 46)
        .def_readwrite("xi", &SamplingConfig::xi)
        .def_readwrite("mu", &SamplingConfig::mu)
        .def_readwrite("sigma", &SamplingConfig::sigma)
        .def_readwrite("nu", &SamplingConfig::nu)
        .def_readwrite("bins", &SamplingConfig::p)
        .def_readwrite("samples", &SamplingConfig::n)
        .def_readwrite("seed", &SamplingConfig::seed);

    py::class_<QuantileGrid>(m, "QuantileGrid")
        .def_readonly("boundaries", &QuantileGrid::boundaries)
        .def_readonly("bins", &QuantileGrid::p)
        .def_property_readonly("source", [](const QuantileGrid& g) {
            return g.source == QuantileGrid::Source::theoretical ? "theoretical" : "empirical";
        });

    py::class_<PerturbationSet>(m, "PerturbationSet")
        .def_readonly("bins", &PerturbationSet::bins)
        .def_readonly("samples", &PerturbationSet::samples)
        .def_readonly("features", &PerturbationSet::features)
        .def_readonly("weights", &PerturbationSet::weights);

    py::class_<Explanation>(m, "Explanation")
        .def_readonly("beta_hat", &Explanation::beta_hat)
        .def_readonly("prediction_at_xi", &Explanation::prediction_at_xi)
        .def_readonly("n_used", &Explanation::n_used)
        .def_readonly("condition_number", &Explanation::condition_number)
        .def("to_json", [](const Explanation& self) { return to_json(self); });

    py::class_<theory::ShrunkParams>(m, "ShrunkParams")
        .def_readonly("mu_tilde", &theory::ShrunkParams::mu_tilde)
        .def_readonly("sigma_tilde", &theory::ShrunkParams::sigma_tilde)
        .def_readonly("c_d", &theory::ShrunkParams::c_d)
        .def_readonly("a_d", &theory::ShrunkParams::a_d);

    py::class_<theory::TheoryReport>(m, "TheoryReport")
        .def_readonly("shrunk", &theory::TheoryReport::shrunk)
        .def_readonly("alpha", &theory::TheoryReport::alpha)
        .def_readonly("theta", &theory::TheoryReport::theta)
        .def_readonly("sigma_matrix", &theory::TheoryReport::sigma_matrix)
        .def_readonly("sigma_inverse", &theory::TheoryReport::sigma_inverse)
        .def_readonly("gamma", &theory::TheoryReport::gamma)
        .def_readonly("beta", &theory::TheoryReport::beta)
        .def_readonly("local_error_center", &theory::TheoryReport::local_error_center)
        .def_readonly("v_crit", &theory::TheoryReport::v_crit);

    py::class_<SummaryStats>(m, "SummaryStats")
        .def_readonly("median", &SummaryStats::median)
        .def_readonly("q1", &SummaryStats::q1)
        .def_readonly("q3", &SummaryStats::q3);

    py::class_<ExperimentRecord>(m, "ExperimentRecord")
        .def_readonly("experiment_id", &ExperimentRecord::experiment_id)
        .def_readonly("repetitions", &ExperimentRecord::repetitions)
        .def_readonly("per_rep_beta_hat", &ExperimentRecord::per_rep_beta_hat)
        .def_readonly("theory", &ExperimentRecord::theory)
        .def_readonly("summary_stats", &ExperimentRecord::summary_stats)
        .def_readonly("wall_time_seconds", &ExperimentRecord::wall_time_seconds)
        .def_property_readonly("metrics", &metrics_dict)
        .def("to_json", [](const ExperimentRecord& self) { return to_json(self); })
        .def("to_csv", [](const ExperimentRecord& self) { return record_csv(self); });

    m.def("eval", &eval, py::arg("model"), py::arg("x"));
    m.def(
        "train_kernel_ridge",
        [](const Dataset& data, double kernel_scale, double ridge) {
            return train_kernel_ridge(data, kernel_scale, ridge);
        },
        py::arg("data"), py::arg("kernel_scale"), py::arg("ridge"));
    m.def("fit_linear", &fit_linear, py::arg("data"));
    m.def("fit_gaussian", &fit_gaussian, py::arg("data"));
    m.def(
        "finite_diff_gradient",
        [](const BlackBoxModel& model, const Eigen::VectorXd& x, std::optional<double> h) {
            return h ? finite_diff_gradient(model, x, *h) : finite_diff_gradient(model, x);
        },
        py::arg("model"), py::arg("x"), py::arg("h") = std::nullopt);
    m.def("load_dataset", &load_dataset, py::arg("path"), py::arg("has_header"),
          py::arg("target_column") = std::nullopt);
    m.def("save_dataset", &save_dataset, py::arg("data"), py::arg("path"));

    m.def("theoretical_grid", &theoretical_grid, py::arg("mu"), py::arg("sigma"), py::arg("bins"));
    m.def("empirical_grid", &empirical_grid, py::arg("data"), py::arg("bins"));
    m.def("discretize", &discretize, py::arg("x"), py::arg("grid"));
    m.def("sample_bins", &sample_bins, py::arg("n"), py::arg("d"), py::arg("bins"),
          py::arg("seed"));
    m.def("perturb", &perturb, py::arg("config"), py::arg("grid"));
    m.def(
        "explain",
        [](const BlackBoxModel& model, const SamplingConfig& config, const QuantileGrid& grid,
           double ridge) { return explain(model, config, grid, ridge); },
        py::arg("model"), py::arg("config"), py::arg("grid"), py::arg("ridge") = 0.0);

    m.def("shrunk_params",
          py::overload_cast<const SamplingConfig&, const QuantileGrid&>(&theory::shrunk_params),
          py::arg("config"), py::arg("grid"));
    m.def("alpha", &theory::alpha, py::arg("j"), py::arg("config"), py::arg("grid"));
    m.def("theta", &theory::theta, py::arg("j"), py::arg("config"), py::arg("grid"));
    m.def("sigma_matrix", &theory::sigma_matrix, py::arg("config"), py::arg("grid"));
    m.def("sigma_inverse", &theory::sigma_inverse, py::arg("config"), py::arg("grid"));
    m.def("v_crit", &theory::v_crit, py::arg("j"), py::arg("config"), py::arg("grid"));
    m.def("expected_weighted_sqnorm", &theory::expected_weighted_sqnorm, py::arg("config"));
    m.def(
        "beta_closed_form",
        [](const LinearModel& model, const SamplingConfig& config, const QuantileGrid& grid) {
            return theory::beta_closed_form(model, config, grid);
        },
        py::arg("model"), py::arg("config"), py::arg("grid"));
    m.def(
        "local_error_center",
        [](const LinearModel& model, const SamplingConfig& config, const QuantileGrid& grid) {
            return theory::local_error_center(model, config, grid);
        },
        py::arg("model"), py::arg("config"), py::arg("grid"));
    m.def(
        "sample_size_bound",
        [](const LinearModel& model, const SamplingConfig& config, const QuantileGrid& grid,
           double epsilon, double eta) {
            return theory::sample_size_bound(model, config, grid, epsilon, eta);
        },
        py::arg("model"), py::arg("config"), py::arg("grid"), py::arg("epsilon"), py::arg("eta"));
    m.def(
        "theory_report",
        [](const LinearModel& model, const SamplingConfig& config, const QuantileGrid& grid) {
            return theory::make_report(model, config, grid);
        },
        py::arg("model"), py::arg("config"), py::arg("grid"));
    m.def(
        "theory_report_json",
        [](const LinearModel& model, const SamplingConfig& config, const QuantileGrid& grid) {
            return to_json(theory::make_report(model, config, grid), config);
        },
        py::arg("model"), py::arg("config"), py::arg("grid"));

    m.def(
        "gauss_closed",
        [](double xi, double mu, double nu, double sigma, double lo, double hi, int order) {
            return gauss_closed(IntegralSpec{xi, mu, nu, sigma, lo, hi, order});
        },
        py::arg("xi"), py::arg("mu"), py::arg("nu"), py::arg("sigma"),
        py::arg("lo") = -std::numeric_limits<double>::infinity(),
        py::arg("hi") = std::numeric_limits<double>::infinity(), py::arg("order") = 0);
    m.def(
        "gauss_quadrature",
        [](double xi, double mu, double nu, double sigma, double lo, double hi, int order,
           double tol) {
            return gauss_quadrature(IntegralSpec{xi, mu, nu, sigma, lo, hi, order}, tol);
        },
        py::arg("xi"), py::arg("mu"), py::arg("nu"), py::arg("sigma"),
        py::arg("lo") = -std::numeric_limits<double>::infinity(),
        py::arg("hi") = std::numeric_limits<double>::infinity(), py::arg("order") = 0,
        py::arg("tol") = 1e-10);

    m.def("run_fig5", &run_fig5, py::arg("seed"));
    m.def("run_switch_off", &run_switch_off, py::arg("seed"));
    m.def("run_error_histogram", &run_error_histogram, py::arg("seed"));
    m.def("run_convergence", &run_convergence, py::arg("seed"));
    m.def(
        "run_dataset_comparison",
        [](const std::filesystem::path& path, const std::string& kind, std::uint64_t seed) {
            return run_dataset_comparison(
                path, kind == "kernel_ridge" ? ModelKind::kernel_ridge : ModelKind::linear, seed);
        },
        py::arg("data_path"), py::arg("model_kind"), py::arg("seed"));
    m.def("write_record_files", &write_record_files, py::arg("record"), py::arg("out_dir"),
          py::arg("plot") = true);
    m.def("cli_main", [](const std::vector<std::string>& args) {
        std::vector<const char*> argv;
        argv.push_back("limelens");
        for (const auto& a : args) argv.push_back(a.c_str());
        return cli_main(static_cast<int>(argv.size()), argv.data());
    });
}
