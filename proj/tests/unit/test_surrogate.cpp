#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "limelens/errors.hpp"
#include "limelens/rng.hpp"
#include "limelens/surrogate.hpp"
#include "limelens/theory.hpp"
#include "support/oracles.hpp"

using namespace limelens;

namespace {

SamplingConfig make_config(const Eigen::VectorXd& xi, double nu, std::int64_t n,
                           std::uint64_t seed) {
    SamplingConfig config;
    config.xi = xi;
    config.mu = Eigen::VectorXd::Zero(xi.size());
    config.sigma = 1.0;
    config.nu = nu;
    config.p = 4;
    config.n = n;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("build_design prepends the phantom column") {
    Eigen::MatrixXi features(1, 2);
    features << 1, 0;
    const Eigen::MatrixXd design = build_design(features);
    REQUIRE(design.rows() == 1);
    REQUIRE(design.cols() == 3);
    CHECK(design(0, 0) == 1.0);
    CHECK(design(0, 1) == 1.0);
    CHECK(design(0, 2) == 0.0);

    const Eigen::MatrixXd empty = build_design(Eigen::MatrixXi(0, 2));
    CHECK(empty.rows() == 0);
    CHECK(empty.cols() == 3);

    Eigen::MatrixXi many = Eigen::MatrixXi::Random(40, 3);
    many = many.unaryExpr([](int v) { return std::abs(v) % 2; });
    CHECK(build_design(many).col(0).sum() == doctest::Approx(40.0));
}

TEST_CASE("wls_solve: intercept-only designs take weighted means") {
    Eigen::MatrixXd design(3, 1);
    design.setOnes();
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    Eigen::VectorXd w(3);
    w.setOnes();
    CHECK(wls_solve(design, y, w, 0.0)(0) == doctest::Approx(2.0).epsilon(1e-14));

    y << 5, 100, -100;
    w << 1.0, 1e-12, 1e-12;
    CHECK(wls_solve(design, y, w, 0.0)(0) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("wls_solve matches the Gauss-Jordan oracle on random systems") {
    Rng rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = rng.uniform_int(3);
        const int n = 2 * d + 2 + rng.uniform_int(190);
        Eigen::MatrixXd design(n, d + 1);
        design.col(0).setOnes();
        for (int i = 0; i < n; ++i) {
            for (int j = 1; j <= d; ++j) design(i, j) = rng.uniform_int(2) - 1;
        }
        // Keep the design full rank by flipping a couple of rows deterministically.
        for (int j = 1; j <= d; ++j) {
            design(j - 1, j) = 1.0;
            design(d + j, j) = 0.0;
        }
        Eigen::VectorXd y(n);
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) {
            y(i) = 3.0 * (rng.uniform01() - 0.5);
            w(i) = 0.05 + 0.95 * rng.uniform01();
        }
        const double ridge = (trial % 3 == 0) ? 0.01 : 0.0;

        Eigen::MatrixXd gram = design.transpose() * w.asDiagonal() * design;
        if (ridge > 0.0) gram.diagonal().array() += n * ridge;
        const Eigen::VectorXd rhs = design.transpose() * (w.asDiagonal() * y);

        Eigen::VectorXd expected;
        try {
            expected = oracles::gauss_jordan_solve(gram, rhs);
        } catch (const std::runtime_error&) {
            continue;  // oracle says singular; skip this draw
        }
        const Eigen::VectorXd got = wls_solve(design, y, w, ridge);
        CHECK((got - expected).lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("wls_solve argument validation and degeneracy") {
    Eigen::MatrixXd design(2, 3);
    design.setOnes();
    Eigen::VectorXd y(2), w(2);
    y.setZero();
    w.setOnes();
    CHECK_THROWS_AS(wls_solve(design, y, w, 0.0), UsageError);   // n < d+1
    CHECK_THROWS_AS(wls_solve(design, y, w, -1.0), UsageError);  // negative ridge

    // All features constant: columns 1..d duplicate the intercept.
    Eigen::MatrixXd flat(10, 3);
    flat.setOnes();
    Eigen::VectorXd y10 = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
    Eigen::VectorXd w10 = Eigen::VectorXd::Constant(10, 0.5);
    try {
        (void)wls_solve(flat, y10, w10, 0.0);
        FAIL("expected DegenerateDesign");
    } catch (const DegenerateDesign& e) {
        const std::string msg = e.what();
        CHECK(msg.find("z1") != std::string::npos);
        CHECK(msg.find("z2") != std::string::npos);
    }
    // Ridge regularizes the same design.
    CHECK(wls_solve(flat, y10, w10, 0.1).allFinite());

    Eigen::VectorXd bad_w = Eigen::VectorXd::Constant(10, 2.0);
    CHECK_THROWS_AS(wls_solve(flat, y10, bad_w, 0.1), UsageError);
}

TEST_CASE("explain: constant models collapse onto the intercept") {
    const Eigen::VectorXd xi = Eigen::VectorXd::Constant(3, 0.2);
    const SamplingConfig config = make_config(xi, 1.0, 500, 99);
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    const LinearModel constant(Eigen::VectorXd::Zero(3), 4.25);
    const Explanation result = explain(constant, config, grid);
    CHECK(result.beta_hat(0) == doctest::Approx(4.25).epsilon(1e-8));
    for (Eigen::Index j = 1; j < 4; ++j) {
        CHECK(std::abs(result.beta_hat(j)) < 1e-8);
    }
}

TEST_CASE("explain: prediction_at_xi is the exact coordinate sum") {
    Eigen::VectorXd xi(4);
    xi << 0.1, -0.6, 1.2, 0.0;
    const SamplingConfig config = make_config(xi, 1.0, 3000, 123);
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    Eigen::VectorXd a(4);
    a << 2.0, -3.0, 0.5, 1.0;
    const Explanation result = explain(LinearModel(a, 1.0), config, grid);
    const double sum = std::accumulate(result.beta_hat.data(),
                                       result.beta_hat.data() + result.beta_hat.size(), 0.0);
    CHECK(result.prediction_at_xi == sum);
    CHECK(result.n_used == 3000);
    CHECK(result.condition_number > 1.0);
}

TEST_CASE("explain: beta_hat concentrates near the closed form") {
    Eigen::VectorXd xi(10);
    xi << 0.35, -0.8, 0.1, 1.4, -0.3, 0.9, -1.2, 0.05, 0.6, -0.45;
    const SamplingConfig config = make_config(xi, 1.0, 20000, 4242);
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(10);
    a(0) = 10.0;
    a(1) = -10.0;
    const LinearModel model(a, 0.0);
    const Explanation result = explain(model, config, grid);
    const Eigen::VectorXd beta = theory::beta_closed_form(model, config, grid);
    CHECK((result.beta_hat - beta).lpNorm<Eigen::Infinity>() < 1.5);
    for (Eigen::Index j = 3; j <= 10; ++j) {
        CHECK(std::abs(result.beta_hat(j)) < 0.75);
    }
}

TEST_CASE("explain: tiny bandwidth degenerates the design") {
    // With nu this small, only samples in xi's own bin keep non-negligible
    // weight, so the feature column is constant 1 where it matters.
    Eigen::VectorXd xi(1);
    xi << 0.3;
    const SamplingConfig config = make_config(xi, 0.01, 200, 5);
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    Eigen::VectorXd a(1);
    a << 10.0;
    const LinearModel model(a, 0.0);
    CHECK_THROWS_AS(explain(model, config, grid), DegenerateDesign);
}

TEST_CASE("explain: model/config dimension mismatch") {
    const SamplingConfig config = make_config(Eigen::VectorXd::Zero(3), 1.0, 100, 1);
    const QuantileGrid grid = theoretical_grid(config.mu, config.sigma, config.p);
    const LinearModel model(Eigen::VectorXd::Zero(2), 0.0);
    CHECK_THROWS_AS(explain(model, config, grid), DimensionMismatch);
}

TEST_CASE("explain: growing ridge never grows the feature-coefficient norm") {
    Eigen::VectorXd xi(4);
    xi << 0.5, -0.25, 1.1, -0.9;
    const QuantileGrid grid = theoretical_grid(Eigen::VectorXd::Zero(4), 1.0, 4);
    Eigen::VectorXd a(4);
    a << 4.0, -2.0, 1.0, 0.0;
    const LinearModel model(a, 0.5);
    for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
        const SamplingConfig config = make_config(xi, 1.0, 4000, seed);
        double previous = std::numeric_limits<double>::infinity();
        for (double ridge : {0.0, 1e-4, 1e-3, 1e-2, 1e-1}) {
            const Explanation result = explain(model, config, grid, ridge);
            const double norm = result.beta_hat.tail(4).norm();
            CHECK(norm <= previous + 1e-12);
            previous = norm;
        }
    }
}
