#include "limelens/models.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "limelens/errors.hpp"

namespace limelens {

namespace {

void check_dim(const BlackBoxModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.dim()) {
        throw DimensionMismatch("model expects dimension " + std::to_string(model.dim()) +
                                ", got " + std::to_string(x.size()));
    }
}

double parse_cell(const std::string& cell, Eigen::Index row, Eigen::Index col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || begin == end) {
        throw UsageError("unparseable cell '" + cell + "' at row " + std::to_string(row + 1) +
                         ", column " + std::to_string(col + 1));
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

KernelRidgeModel::KernelRidgeModel(Eigen::MatrixXd train_x, Eigen::VectorXd dual_coeffs,
                                   double kernel_scale, double ridge)
    : train_x_(std::move(train_x)),
      dual_coeffs_(std::move(dual_coeffs)),
      kernel_scale_(kernel_scale),
      ridge_(ridge) {
    if (dual_coeffs_.size() != train_x_.rows()) {
        throw DimensionMismatch("dual coefficient count must match training rows");
    }
    if (!(kernel_scale_ > 0.0) || !(ridge_ > 0.0)) {
        throw UsageError("kernel_scale and ridge must be positive");
    }
}

double KernelRidgeModel::value(const Eigen::VectorXd& x) const {
    const double inv_two_s2 = 1.0 / (2.0 * kernel_scale_ * kernel_scale_);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < train_x_.rows(); ++i) {
        const double d2 = (train_x_.row(i).transpose() - x).squaredNorm();
        acc += dual_coeffs_(i) * std::exp(-d2 * inv_two_s2);
    }
    return acc;
}

void Dataset::validate() const {
    if (rows.rows() < 2) throw UsageError("dataset needs at least 2 rows");
    if (!rows.allFinite()) throw UsageError("dataset contains non-finite entries");
    if (targets && targets->size() != rows.rows()) {
        throw DimensionMismatch("targets length must match row count");
    }
    if (static_cast<Eigen::Index>(feature_names.size()) != rows.cols()) {
        throw DimensionMismatch("feature_names length must match column count");
    }
}

double eval(const BlackBoxModel& model, const Eigen::VectorXd& x) {
    check_dim(model, x);
    return model.value(x);
}

KernelRidgeModel train_kernel_ridge(const Dataset& data, double kernel_scale, double ridge) {
    if (!data.targets) throw UsageError("train_kernel_ridge requires targets");
    if (!(kernel_scale > 0.0)) throw UsageError("kernel_scale must be positive");
    if (!(ridge > 0.0)) throw UsageError("ridge must be positive");

    const Eigen::Index m = data.rows.rows();
    const Eigen::VectorXd& y = *data.targets;
    Eigen::MatrixXd gram(m, m);
    const double inv_two_s2 = 1.0 / (2.0 * kernel_scale * kernel_scale);
    for (Eigen::Index i = 0; i < m; ++i) {
        gram(i, i) = 1.0 + ridge;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double k = std::exp(-(data.rows.row(i) - data.rows.row(j)).squaredNorm() *
                                      inv_two_s2);
            gram(i, j) = k;
            gram(j, i) = k;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    Eigen::VectorXd coeffs;
    if (llt.info() == Eigen::Success) {
        coeffs = llt.solve(y);
    } else {
        coeffs = gram.ldlt().solve(y);
    }
    const double residual = (gram * coeffs - y).norm();
    if (!coeffs.allFinite() || residual > 1e-8 * std::max(y.norm(), 1e-300)) {
        throw NumericalError("kernel ridge system solved poorly (residual " +
                             std::to_string(residual) + ")");
    }
    return KernelRidgeModel(data.rows, std::move(coeffs), kernel_scale, ridge);
}

LinearModel fit_linear(const Dataset& data) {
    if (!data.targets) throw UsageError("fit_linear requires targets");
    const Eigen::Index m = data.rows.rows();
    const Eigen::Index d = data.rows.cols();
    Eigen::MatrixXd design(m, d + 1);
    design.col(0).setOnes();
    design.rightCols(d) = data.rows;
    const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(*data.targets);
    if (!sol.allFinite()) throw NumericalError("linear fit failed");
    return LinearModel(sol.tail(d), sol(0));
}

Eigen::VectorXd finite_diff_gradient(const BlackBoxModel& model, const Eigen::VectorXd& x,
                                     double h) {
    check_dim(model, x);
    if (!(h > 0.0)) throw UsageError("finite difference step must be positive");
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        probe(j) = x(j) + h;
        const double fp = model.value(probe);
        probe(j) = x(j) - h;
        const double fm = model.value(probe);
        probe(j) = x(j);
        grad(j) = (fp - fm) / (2.0 * h);
    }
    return grad;
}

Eigen::VectorXd finite_diff_gradient(const BlackBoxModel& model, const Eigen::VectorXd& x) {
    check_dim(model, x);
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = 1e-4 * std::max(1.0, std::abs(x(j)));
        probe(j) = x(j) + h;
        const double fp = model.value(probe);
        probe(j) = x(j) - h;
        const double fm = model.value(probe);
        probe(j) = x(j);
        grad(j) = (fp - fm) / (2.0 * h);
    }
    return grad;
}

Dataset load_dataset(const std::filesystem::path& path, bool has_header,
                     const std::optional<std::string>& target_column) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path.string() + "'");

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && !(line.size() == 1 && line[0] == '\r')) lines.push_back(line);
    }
    if (lines.empty()) throw UsageError("empty CSV file '" + path.string() + "'");

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (has_header) {
        header = split_csv_line(lines[0]);
        first_data = 1;
        if (lines.size() == first_data) throw UsageError("CSV has a header but no data rows");
    }

    const Eigen::Index ncols = static_cast<Eigen::Index>(split_csv_line(lines[first_data]).size());
    if (has_header && static_cast<Eigen::Index>(header.size()) != ncols) {
        throw UsageError("header has " + std::to_string(header.size()) + " fields but rows have " +
                         std::to_string(ncols));
    }

    const Eigen::Index nrows = static_cast<Eigen::Index>(lines.size() - first_data);
    Eigen::MatrixXd table(nrows, ncols);
    for (Eigen::Index r = 0; r < nrows; ++r) {
        const auto cells = split_csv_line(lines[first_data + static_cast<std::size_t>(r)]);
        if (static_cast<Eigen::Index>(cells.size()) != ncols) {
            throw UsageError("row " + std::to_string(r + 1) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(ncols));
        }
        for (Eigen::Index c = 0; c < ncols; ++c) table(r, c) = parse_cell(cells[c], r, c);
    }

    Eigen::Index target_idx = -1;
    if (target_column) {
        if (has_header) {
            for (Eigen::Index c = 0; c < ncols; ++c) {
                if (header[static_cast<std::size_t>(c)] == *target_column) {
                    target_idx = c;
                    break;
                }
            }
        }
        if (target_idx < 0) {
            int idx = -1;
            const auto [ptr, ec] = std::from_chars(
                target_column->data(), target_column->data() + target_column->size(), idx);
            if (ec == std::errc() && ptr == target_column->data() + target_column->size() &&
                idx >= 0 && idx < ncols) {
                target_idx = idx;
            }
        }
        if (target_idx < 0) {
            throw UsageError("target column '" + *target_column + "' not found");
        }
    }

    Dataset data;
    if (target_idx >= 0) {
        data.rows.resize(nrows, ncols - 1);
        Eigen::VectorXd targets(nrows);
        Eigen::Index out = 0;
        for (Eigen::Index c = 0; c < ncols; ++c) {
            if (c == target_idx) continue;
            data.rows.col(out++) = table.col(c);
        }
        targets = table.col(target_idx);
        data.targets = std::move(targets);
    } else {
        data.rows = std::move(table);
    }

    data.feature_names.reserve(static_cast<std::size_t>(data.rows.cols()));
    Eigen::Index out_col = 0;
    for (Eigen::Index c = 0; c < ncols; ++c) {
        if (c == target_idx) continue;
        if (has_header) {
            data.feature_names.push_back(header[static_cast<std::size_t>(c)]);
        } else {
            data.feature_names.push_back("x" + std::to_string(out_col + 1));
        }
        ++out_col;
    }
    return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
        if (j) out << ',';
        out << data.feature_names[j];
    }
    if (data.targets) out << ",target";
    out << '\n';
    for (Eigen::Index r = 0; r < data.rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.rows.cols(); ++c) {
            if (c) out << ',';
            out << format_g17(data.rows(r, c));
        }
        if (data.targets) out << ',' << format_g17((*data.targets)(r));
        out << '\n';
    }
}

GaussianFit fit_gaussian(const Dataset& data) {
    data.validate();
    const Eigen::Index m = data.rows.rows();
    const Eigen::Index d = data.rows.cols();
    GaussianFit fit;
    fit.mu = data.rows.colwise().mean();
    fit.per_feature_sigma.resize(d);
    double var_sum = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
        const double var =
            (data.rows.col(c).array() - fit.mu(c)).square().sum() / static_cast<double>(m - 1);
        fit.per_feature_sigma(c) = std::sqrt(var);
        var_sum += var;
    }
    fit.sigma = std::sqrt(var_sum / static_cast<double>(d));
    if (!(fit.sigma > 0.0)) {
        throw NumericalError("degenerate dataset: zero variance in every feature");
    }
    return fit;
}

}  // namespace limelens
