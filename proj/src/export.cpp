#include "limelens/export.hpp"

#include <cmath>
#include <cstdio>

namespace limelens {

namespace {

std::string json_real(double v) {
    if (!std::isfinite(v)) return "null";
    return format_real(v);
}

std::string json_vector(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += json_real(v(i));
    }
    return out + "]";
}

std::string json_matrix(const Eigen::MatrixXd& m) {
    std::string out = "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) out += ",";
        out += json_vector(m.row(r).transpose());
    }
    return out + "]";
}

std::string theory_body(const theory::TheoryReport& report) {
    std::string out;
    out += "\"beta\":" + json_vector(report.beta);
    out += ",\"prediction_at_xi\":" + json_real(report.local_error_center);
    out += ",\"local_error_center\":" + json_real(report.local_error_center);
    out += ",\"alpha\":" + json_vector(report.alpha);
    out += ",\"theta\":" + json_vector(report.theta);
    out += ",\"gamma\":" + json_vector(report.gamma);
    out += ",\"sigma_matrix\":" + json_matrix(report.sigma_matrix);
    out += ",\"sigma_inverse\":" + json_matrix(report.sigma_inverse);
    out += ",\"v_crit\":[";
    for (std::size_t j = 0; j < report.v_crit.size(); ++j) {
        if (j) out += ",";
        out += report.v_crit[j] ? json_real(*report.v_crit[j]) : "null";
    }
    out += "]";
    out += ",\"shrunk\":{\"mu_tilde\":" + json_vector(report.shrunk.mu_tilde);
    out += ",\"sigma_tilde\":" + json_real(report.shrunk.sigma_tilde);
    out += ",\"c_d\":" + json_real(report.shrunk.c_d);
    out += ",\"a_d\":" + json_real(report.shrunk.a_d) + "}";
    return out;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_json(const SamplingConfig& config) {
    std::string out = "{";
    out += "\"xi\":" + json_vector(config.xi);
    out += ",\"mu\":" + json_vector(config.mu);
    out += ",\"sigma\":" + json_real(config.sigma);
    out += ",\"nu\":" + json_real(config.nu);
    out += ",\"bins\":" + std::to_string(config.p);
    out += ",\"samples\":" + std::to_string(config.n);
    out += ",\"seed\":" + std::to_string(config.seed);
    return out + "}";
}

std::string to_json(const Explanation& explanation) {
    std::string out = "{";
    out += "\"beta_hat\":" + json_vector(explanation.beta_hat);
    out += ",\"prediction_at_xi\":" + json_real(explanation.prediction_at_xi);
    out += ",\"n_used\":" + std::to_string(explanation.n_used);
    out += ",\"condition_number\":" + json_real(explanation.condition_number);
    out += ",\"config\":" + to_json(explanation.config_echo);
    return out + "}";
}

std::string to_json(const theory::TheoryReport& report, const SamplingConfig& config) {
    std::string out = "{";
    out += theory_body(report);
    out += ",\"config\":" + to_json(config);
    return out + "}";
}

std::string to_json(const ExperimentRecord& record) {
    std::string out = "{";
    out += "\"experiment_id\":\"" + record.experiment_id + "\"";
    out += ",\"config\":" + to_json(record.config);
    out += ",\"repetitions\":" + std::to_string(record.repetitions);
    out += ",\"per_rep_beta_hat\":" + json_matrix(record.per_rep_beta_hat);
    out += ",\"theory\":{" + theory_body(record.theory) + "}";
    out += ",\"summary_stats\":{";
    out += "\"median\":" + json_vector(record.summary_stats.median);
    out += ",\"q1\":" + json_vector(record.summary_stats.q1);
    out += ",\"q3\":" + json_vector(record.summary_stats.q3) + "}";
    out += ",\"metrics\":{";
    for (std::size_t i = 0; i < record.metrics.size(); ++i) {
        if (i) out += ",";
        out += "\"" + record.metrics[i].first + "\":" + json_real(record.metrics[i].second);
    }
    out += "}";
    return out + "}";
}

std::string to_csv(const Explanation& explanation) {
    std::string out = "field,value\n";
    for (Eigen::Index j = 0; j < explanation.beta_hat.size(); ++j) {
        out += "beta_" + std::to_string(j) + "," + format_real(explanation.beta_hat(j)) + "\n";
    }
    out += "prediction_at_xi," + format_real(explanation.prediction_at_xi) + "\n";
    out += "n_used," + std::to_string(explanation.n_used) + "\n";
    out += "condition_number," + format_real(explanation.condition_number) + "\n";
    return out;
}

std::string to_csv(const theory::TheoryReport& report) {
    std::string out = "field,value\n";
    for (Eigen::Index j = 0; j < report.beta.size(); ++j) {
        out += "beta_" + std::to_string(j) + "," + format_real(report.beta(j)) + "\n";
    }
    for (Eigen::Index j = 0; j < report.alpha.size(); ++j) {
        out += "alpha_" + std::to_string(j + 1) + "," + format_real(report.alpha(j)) + "\n";
    }
    for (Eigen::Index j = 0; j < report.theta.size(); ++j) {
        out += "theta_" + std::to_string(j + 1) + "," + format_real(report.theta(j)) + "\n";
    }
    for (std::size_t j = 0; j < report.v_crit.size(); ++j) {
        out += "v_crit_" + std::to_string(j + 1) + ",";
        out += report.v_crit[j] ? format_real(*report.v_crit[j]) : std::string("undefined");
        out += "\n";
    }
    out += "local_error_center," + format_real(report.local_error_center) + "\n";
    out += "c_d," + format_real(report.shrunk.c_d) + "\n";
    out += "sigma_tilde," + format_real(report.shrunk.sigma_tilde) + "\n";
    out += "a_d," + format_real(report.shrunk.a_d) + "\n";
    return out;
}

std::string record_csv(const ExperimentRecord& record) {
    std::string out = "rep";
    for (Eigen::Index j = 0; j < record.per_rep_beta_hat.cols(); ++j) {
        out += ",beta_" + std::to_string(j);
    }
    out += "\n";
    for (Eigen::Index r = 0; r < record.per_rep_beta_hat.rows(); ++r) {
        out += std::to_string(r);
        for (Eigen::Index j = 0; j < record.per_rep_beta_hat.cols(); ++j) {
            out += "," + format_real(record.per_rep_beta_hat(r, j));
        }
        out += "\n";
    }
    return out;
}

void write_perturbations_csv(std::ostream& out, const PerturbationSet& set) {
    const Eigen::Index d = set.bins.cols();
    for (Eigen::Index j = 0; j < d; ++j) out << "y_" << (j + 1) << ",";
    for (Eigen::Index j = 0; j < d; ++j) out << "x_" << (j + 1) << ",";
    for (Eigen::Index j = 0; j < d; ++j) out << "z_" << (j + 1) << ",";
    out << "pi\n";
    for (Eigen::Index i = 0; i < set.bins.rows(); ++i) {
        for (Eigen::Index j = 0; j < d; ++j) out << set.bins(i, j) << ",";
        for (Eigen::Index j = 0; j < d; ++j) out << format_real(set.samples(i, j)) << ",";
        for (Eigen::Index j = 0; j < d; ++j) out << set.features(i, j) << ",";
        out << format_real(set.weights(i)) << "\n";
    }
}

}  // namespace limelens
