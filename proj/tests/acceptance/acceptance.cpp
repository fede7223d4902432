// Acceptance suite: one function per criterion, each pinned to the
// tolerances and runtime budgets it must meet. Prints one PASS/FAIL line
// per criterion; exit code 0 only if every requested criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "limelens/export.hpp"
#include "limelens/harness.hpp"
#include "limelens/integrals.hpp"
#include "limelens/normal.hpp"
#include "limelens/parallel.hpp"
#include "limelens/rng.hpp"
#include "limelens/sampling.hpp"
#include "limelens/surrogate.hpp"
#include "limelens/theory.hpp"
#include "support/oracles.hpp"

using namespace limelens;

namespace {

constexpr std::uint64_t kSeed = 46;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

SamplingConfig fig5_config(std::uint64_t seed) {
    SamplingConfig config;
    config.mu = Eigen::VectorXd::Zero(10);
    config.sigma = 1.0;
    config.nu = 1.0;
    config.p = 4;
    config.n = 10000;
    config.seed = seed;
    Rng rng = stream_rng(seed, streams::kInstance, 0);
    config.xi.resize(10);
    for (Eigen::Index j = 0; j < 10; ++j) config.xi(j) = rng.gaussian();
    return config;
}

LinearModel fig5_model() {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(10);
    a(0) = 10.0;
    a(1) = -10.0;
    return LinearModel(a, 0.0);
}

// C1: closed-form self-consistency over 100 random configurations.
Check criterion1() {
    Check check;
    Rng rng(1001);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_int(10)) - 1;
        SamplingConfig config;
        config.xi.resize(d);
        config.mu.resize(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            config.xi(j) = 3.0 * (rng.uniform01() - 0.5);
            config.mu(j) = 2.0 * (rng.uniform01() - 0.5);
        }
        config.sigma = 0.3 + 2.7 * rng.uniform01();
        config.nu = 0.3 + 2.7 * rng.uniform01();
        config.p = 4;
        config.n = 10;
        config.seed = rng.next_u64();
        const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);

        Eigen::VectorXd a(d);
        for (Eigen::Index j = 0; j < d; ++j) a(j) = 8.0 * (rng.uniform01() - 0.5);
        const LinearModel model(a, 4.0 * (rng.uniform01() - 0.5));

        const Eigen::MatrixXd sigma = theory::sigma_matrix(config, grid);
        const Eigen::MatrixXd inverse = theory::sigma_inverse(config, grid);
        const double identity_gap =
            (sigma * inverse - Eigen::MatrixXd::Identity(d + 1, d + 1))
                .lpNorm<Eigen::Infinity>();
        check.require(identity_gap <= 1e-10,
                      "trial " + std::to_string(trial) + ": |Sigma Sigma^-1 - I| = " +
                          std::to_string(identity_gap));

        const Eigen::VectorXd direct = theory::beta_closed_form(model, config, grid);
        const Eigen::VectorXd via =
            inverse * theory::gamma_vector(model, config, grid);
        const double beta_gap = (direct - via).lpNorm<Eigen::Infinity>();
        check.require(beta_gap <= 1e-10, "trial " + std::to_string(trial) +
                                             ": |beta - Sigma^-1 Gamma| = " +
                                             std::to_string(beta_gap));
    }
    return check;
}

// C2: Gaussian-integral lemmas against adaptive quadrature, 1000 specs.
Check criterion2() {
    Check check;
    Rng rng(2002);
    for (int trial = 0; trial < 1000; ++trial) {
        IntegralSpec spec;
        spec.xi = 4.0 * (rng.uniform01() - 0.5);
        spec.mu = 4.0 * (rng.uniform01() - 0.5);
        spec.nu = 0.3 + 2.7 * rng.uniform01();
        spec.sigma = 0.3 + 2.7 * rng.uniform01();
        const int shape = rng.uniform_int(10);
        if (shape <= 2) {
            spec.order = 2;  // full line only
            spec.lo = -kInf;
            spec.hi = kInf;
        } else {
            spec.order = rng.uniform_int(2) - 1;
            const int kind = rng.uniform_int(4);
            if (kind == 1) {
                spec.lo = -kInf;
                spec.hi = kInf;
            } else if (kind == 2) {
                spec.lo = -kInf;
                spec.hi = 3.0 * (rng.uniform01() - 0.5);
            } else if (kind == 3) {
                spec.lo = 3.0 * (rng.uniform01() - 0.5);
                spec.hi = kInf;
            } else {
                spec.lo = 4.0 * (rng.uniform01() - 0.5);
                spec.hi = spec.lo + 1e-6 + 3.0 * rng.uniform01();
            }
        }
        const double closed = gauss_closed(spec);
        const double quad = gauss_quadrature(spec, 1e-11);
        check.require(std::abs(closed - quad) <= 1e-8,
                      "trial " + std::to_string(trial) + ": |closed - quadrature| = " +
                          std::to_string(std::abs(closed - quad)));
    }
    return check;
}

// C3: Monte Carlo moment agreement at n = 1e6 within 4 standard errors.
Check criterion3() {
    Check check;
    SamplingConfig config = fig5_config(kSeed);
    config.n = 1000000;
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    const LinearModel model = fig5_model();
    const Eigen::Index d = config.dim();

    const PerturbationSet set = perturb(config, grid);
    const Eigen::MatrixXd sigma = theory::sigma_matrix(config, grid);
    const Eigen::VectorXd gamma = theory::gamma_vector(model, config, grid);

    // Augmented features with the phantom coordinate up front.
    const auto z = [&](std::int64_t i, Eigen::Index k) {
        return k == 0 ? 1.0 : static_cast<double>(set.features(i, k - 1));
    };

    const Eigen::Index m = d + 1;
    Eigen::MatrixXd sum_sigma = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd sumsq_sigma = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd sum_gamma = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sumsq_gamma = Eigen::VectorXd::Zero(m);

    Eigen::VectorXd x(d);
    for (std::int64_t i = 0; i < config.n; ++i) {
        const double w = set.weights(i);
        x = set.samples.row(i).transpose();
        const double f = model.value(x);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double zk = z(i, k);
            const double g = w * zk * f;
            sum_gamma(k) += g;
            sumsq_gamma(k) += g * g;
            for (Eigen::Index l = k; l < m; ++l) {
                const double v = w * zk * z(i, l);
                sum_sigma(k, l) += v;
                sumsq_sigma(k, l) += v * v;
            }
        }
    }

    const double n = static_cast<double>(config.n);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index l = k; l < m; ++l) {
            const double mean = sum_sigma(k, l) / n;
            const double var = sumsq_sigma(k, l) / n - mean * mean;
            const double se = std::sqrt(std::max(var, 1e-30) / n);
            check.require(std::abs(mean - sigma(k, l)) <= 4.0 * se,
                          "Sigma(" + std::to_string(k) + "," + std::to_string(l) +
                              ") off by " + std::to_string(std::abs(mean - sigma(k, l)) / se) +
                              " SE");
        }
    }
    for (Eigen::Index k = 0; k < m; ++k) {
        const double mean = sum_gamma(k) / n;
        const double var = sumsq_gamma(k) / n - mean * mean;
        const double se = std::sqrt(std::max(var, 1e-30) / n);
        check.require(std::abs(mean - gamma(k)) <= 4.0 * se,
                      "Gamma(" + std::to_string(k) + ") off by " +
                          std::to_string(std::abs(mean - gamma(k)) / se) + " SE");
    }
    return check;
}

// C4: desk-scale figure-5 reproduction against the closed form.
Check criterion4() {
    Check check;
    const ExperimentRecord record = run_fig5(kSeed);
    check.require(record.metric("abs_error_beta1") <= 1.0,
                  "median beta_1 off by " + std::to_string(record.metric("abs_error_beta1")));
    check.require(record.metric("abs_error_beta2") <= 1.0,
                  "median beta_2 off by " + std::to_string(record.metric("abs_error_beta2")));
    check.require(record.metric("max_abs_tail_median") <= 0.3,
                  "tail coordinate median reached " +
                      std::to_string(record.metric("max_abs_tail_median")));
    return check;
}

// C5: switch-off at nu = sqrt(V_crit) of feature 2.
Check criterion5() {
    Check check;
    const ExperimentRecord record = run_switch_off(kSeed);
    check.require(std::abs(record.theory.beta(2)) <= 1e-10,
                  "theory beta_2 = " + std::to_string(record.theory.beta(2)));
    check.require(std::abs(record.metric("median_beta2")) <= 0.3,
                  "median beta_2 = " + std::to_string(record.metric("median_beta2")));
    check.require(std::abs(record.metric("median_beta1")) >= 5.0,
                  "median beta_1 = " + std::to_string(record.metric("median_beta1")));
    return check;
}

// C6: the local error concentrates around a nonzero center.
Check criterion6() {
    Check check;
    const ExperimentRecord record = run_error_histogram(kSeed);
    const double mean = record.metric("error_mean");
    const double center = record.metric("theory_center");
    const double se = record.metric("error_se");
    check.require(std::abs(mean - center) <= 0.3,
                  "mean " + std::to_string(mean) + " vs center " + std::to_string(center));
    check.require(std::abs(center) > 3.0 * se,
                  "|center| = " + std::to_string(std::abs(center)) + " not above 3 SE = " +
                      std::to_string(3.0 * se));
    return check;
}

// C7: concentration rate ~ n^(-1/2).
Check criterion7() {
    Check check;
    const ExperimentRecord record = run_convergence(kSeed);
    const double slope = record.metric("loglog_slope");
    check.require(std::abs(slope + 0.5) <= 0.15, "log-log slope = " + std::to_string(slope));
    check.require(record.metric("seeds_monotone") == 10.0,
                  "error at n=1e5 did not drop below n=1e3 for every seed");
    return check;
}

// C8: sampling correctness — support, distribution equivalence, z frequency.
Check criterion8() {
    Check check;
    SamplingConfig config = fig5_config(kSeed);
    config.n = 100000;  // 1e5 rows x 10 coordinates = 1e6 truncated draws
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    const PerturbationSet set = perturb(config, grid);
    const Eigen::Index d = config.dim();

    std::int64_t violations = 0;
    for (std::int64_t i = 0; i < config.n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const int bin = set.bins(i, j);
            if (!(set.samples(i, j) > grid.lower(j, bin) &&
                  set.samples(i, j) <= grid.upper(j, bin))) {
                ++violations;
            }
        }
    }
    check.require(violations == 0, std::to_string(violations) + " support violations");

    const int cells = 50;
    const double n = static_cast<double>(config.n);
    for (Eigen::Index j = 0; j < d; ++j) {
        std::vector<int> counts(cells, 0);
        for (std::int64_t i = 0; i < config.n; ++i) {
            const double u = normal_cdf((set.samples(i, j) - config.mu(j)) / config.sigma);
            int cell = static_cast<int>(u * cells);
            if (cell >= cells) cell = cells - 1;
            ++counts[static_cast<std::size_t>(cell)];
        }
        double stat = 0.0;
        const double expected = n / cells;
        for (int c = 0; c < cells; ++c) {
            const double diff = counts[static_cast<std::size_t>(c)] - expected;
            stat += diff * diff / expected;
        }
        const double pvalue = oracles::chi_square_pvalue(stat, cells - 1);
        check.require(pvalue > 0.001, "coordinate " + std::to_string(j) +
                                          " chi-square p = " + std::to_string(pvalue));

        const double freq = set.features.col(j).cast<double>().mean();
        const double band = 3.0 * std::sqrt(0.25 * 0.75 / n);
        check.require(std::abs(freq - 0.25) <= band,
                      "coordinate " + std::to_string(j) + " z-frequency " +
                          std::to_string(freq));
    }
    return check;
}

// C9: byte-identical records across thread counts, driven through the
// documented LIME_LENS_THREADS override.
Check criterion9() {
    Check check;
    const auto base = std::filesystem::temp_directory_path() / "limelens_acceptance_c9";
    std::filesystem::remove_all(base);

    const auto read_bytes = [](const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };

    set_worker_count_override(0);
    setenv("LIME_LENS_THREADS", "1", 1);
    const ExperimentRecord serial = run_fig5(kSeed);
    write_record_files(serial, base / "serial", false);
    setenv("LIME_LENS_THREADS", "4", 1);
    const ExperimentRecord parallel = run_fig5(kSeed);
    write_record_files(parallel, base / "parallel", false);
    unsetenv("LIME_LENS_THREADS");

    const std::string serial_bytes = read_bytes(base / "serial" / "fig5" / "record.json");
    const std::string parallel_bytes = read_bytes(base / "parallel" / "fig5" / "record.json");
    check.require(!serial_bytes.empty(), "missing record.json");
    check.require(serial_bytes == parallel_bytes, "record.json differs across thread counts");
    check.require(to_json(serial) == to_json(parallel), "in-memory records differ");
    return check;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Check()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "closed-form self-consistency (Sigma, beta)", 5.0, criterion1},
        {2, "Gaussian-integral lemmas vs quadrature", 30.0, criterion2},
        {3, "Monte Carlo moment agreement at n=1e6", 120.0, criterion3},
        {4, "figure-5 reproduction at desk scale", 60.0, criterion4},
        {5, "switch-off at the critical bandwidth", 60.0, criterion5},
        {6, "local-error gap away from zero", 120.0, criterion6},
        {7, "concentration rate n^(-1/2)", 300.0, criterion7},
        {8, "sampling correctness (support, law, z-frequency)", 150.0, criterion8},
        {9, "byte-identical records across thread counts", 150.0, criterion9},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) {
        wanted.push_back(std::atoi(argv[i]));
    }

    bool all_ok = true;
    for (const auto& criterion : criteria()) {
        if (!wanted.empty() &&
            std::find(wanted.begin(), wanted.end(), criterion.id) == wanted.end()) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Check check;
        try {
            check = criterion.run();
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = elapsed < criterion.budget_seconds;
        const bool ok = check.ok && in_budget;
        all_ok = all_ok && ok;
        std::printf("[%s] criterion %d: %s (%.2f s, budget %.0f s)%s%s\n", ok ? "PASS" : "FAIL",
                    criterion.id, criterion.name, elapsed, criterion.budget_seconds,
                    check.detail.empty() ? "" : " — ", check.detail.c_str());
    }
    return all_ok ? 0 : 1;
}
