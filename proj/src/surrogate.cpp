#include "limelens/surrogate.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "limelens/errors.hpp"
#include "limelens/parallel.hpp"

namespace limelens {

namespace {

constexpr double kConditionLimit = 1e12;

struct NormalSystem {
    Eigen::MatrixXd gram;  // Z^T Pi Z (+ n ridge I)
    Eigen::VectorXd rhs;   // Z^T Pi y
    double condition = 0.0;
};

NormalSystem assemble(const Eigen::MatrixXd& design, const Eigen::VectorXd& responses,
                      const Eigen::VectorXd& weights, double ridge) {
    NormalSystem sys;
    const Eigen::MatrixXd weighted = weights.asDiagonal() * design;
    sys.gram = design.transpose() * weighted;
    sys.rhs = weighted.transpose() * responses;
    if (ridge > 0.0) {
        sys.gram.diagonal().array() += static_cast<double>(design.rows()) * ridge;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.gram,
                                                             Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    sys.condition = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    return sys;
}

std::string constant_column_names(const Eigen::MatrixXd& design) {
    std::string names;
    for (Eigen::Index c = 1; c < design.cols(); ++c) {
        const double first = design.rows() > 0 ? design(0, c) : 0.0;
        if (design.rows() == 0 || (design.col(c).array() == first).all()) {
            if (!names.empty()) names += ", ";
            names += "z" + std::to_string(c);
        }
    }
    return names.empty() ? "none identified" : names;
}

Eigen::VectorXd solve_normal(const NormalSystem& sys, const Eigen::MatrixXd& design,
                             double ridge) {
    if (ridge <= 0.0 && !(sys.condition < kConditionLimit)) {
        throw DegenerateDesign(
            "normal matrix is singular to tolerance (condition " +
            std::to_string(sys.condition) + "); constant feature columns: " +
            constant_column_names(design));
    }
    Eigen::VectorXd beta = sys.gram.ldlt().solve(sys.rhs);
    const double scale = std::max(sys.rhs.norm(), 1e-300);
    double residual = (sys.gram * beta - sys.rhs).norm() / scale;
    if (residual > 1e-8) {
        // One step of iterative refinement before giving up.
        beta += sys.gram.ldlt().solve(sys.rhs - sys.gram * beta);
        residual = (sys.gram * beta - sys.rhs).norm() / scale;
        if (residual > 1e-8 || !beta.allFinite()) {
            throw NumericalError("weighted least squares did not reach the requested " +
                                 std::string("residual (got ") + std::to_string(residual) + ")");
        }
    }
    return beta;
}

}  // namespace

Eigen::MatrixXd build_design(const Eigen::MatrixXi& features) {
    Eigen::MatrixXd design(features.rows(), features.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(features.cols()) = features.cast<double>();
    return design;
}

Eigen::VectorXd wls_solve(const Eigen::MatrixXd& design, const Eigen::VectorXd& responses,
                          const Eigen::VectorXd& weights, double ridge) {
    if (design.rows() != responses.size() || design.rows() != weights.size()) {
        throw DimensionMismatch("design, responses and weights must share the row count");
    }
    if (ridge < 0.0) throw UsageError("ridge must be nonnegative");
    if (ridge == 0.0 && design.rows() < design.cols()) {
        throw UsageError("need at least d+1 samples for an unregularized fit");
    }
    if (weights.size() > 0 && !(weights.minCoeff() > 0.0 && weights.maxCoeff() <= 1.0)) {
        throw UsageError("weights must lie in (0, 1]");
    }
    const NormalSystem sys = assemble(design, responses, weights, ridge);
    return solve_normal(sys, design, ridge);
}

Explanation explain(const BlackBoxModel& model, const SamplingConfig& config,
                    const QuantileGrid& grid, double ridge) {
    config.validate();
    if (model.dim() != config.dim()) {
        throw DimensionMismatch("model dimension " + std::to_string(model.dim()) +
                                " does not match config dimension " +
                                std::to_string(config.dim()));
    }

    const PerturbationSet set = perturb(config, grid);

    Eigen::VectorXd responses(config.n);
    parallel_chunks(config.n, [&](std::int64_t begin, std::int64_t end) {
        Eigen::VectorXd x(config.dim());
        for (std::int64_t i = begin; i < end; ++i) {
            x = set.samples.row(i).transpose();
            responses(i) = model.value(x);
        }
    });
    for (std::int64_t i = 0; i < config.n; ++i) {
        if (!std::isfinite(responses(i))) {
            throw NumericalError("model evaluation failed at sample " + std::to_string(i) +
                                 " (non-finite value)");
        }
    }

    const Eigen::MatrixXd design = build_design(set.features);
    const NormalSystem sys = assemble(design, responses, set.weights, ridge);

    Explanation result;
    result.beta_hat = solve_normal(sys, design, ridge);
    result.prediction_at_xi =
        std::accumulate(result.beta_hat.data(), result.beta_hat.data() + result.beta_hat.size(),
                        0.0);
    result.n_used = config.n;
    result.condition_number = sys.condition;
    result.config_echo = config;
    return result;
}

}  // namespace limelens
