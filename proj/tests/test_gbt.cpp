#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "test_util.hpp"
#include "traitlab/predict/gbt.hpp"
#include "traitlab/predict/loo.hpp"

using namespace traitlab;
using namespace traitlab::predict;

TEST_CASE("constant target needs zero trees and has zero training error") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 3);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(6, 4.25);
  const auto model = fit_gbt(x, y);
  CHECK(model.trees.empty());
  CHECK(model.init_value == 4.25);
  const auto pred = model.predict(x);
  CHECK((pred.array() - 4.25).abs().maxCoeff() == 0.0);
}

TEST_CASE("stump-learnable step function is driven below 1e-4") {
  Rng rng(173);
  Eigen::MatrixXd x(20, 3);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = rng.uniform(0, 1);
    x(i, 1) = rng.uniform(0, 1);
    x(i, 2) = rng.uniform(0, 1);
    y(i) = x(i, 0) > 0.5 ? 2.0 : -1.0;
  }
  GbtConfig cfg;
  cfg.n_trees = 50;
  cfg.max_depth = 1;
  cfg.learning_rate = 0.5;
  const auto model = fit_gbt(x, y, cfg);
  const double mse = (model.predict(x) - y).squaredNorm() / 20.0;
  CHECK(mse < 1e-4);
}

TEST_CASE("depth-1 single tree matches the exhaustive split-search oracle") {
  Rng rng(179);
  for (int rep = 0; rep < 30; ++rep) {
    Eigen::MatrixXd x = testutil::random_matrix(rng, 4, 2);
    Eigen::VectorXd y(4);
    for (int i = 0; i < 4; ++i) y(i) = rng.uniform(-2, 2);

    GbtConfig cfg;
    cfg.n_trees = 1;
    cfg.max_depth = 1;
    cfg.learning_rate = 1.0;
    const auto model = fit_gbt(x, y, cfg);
    REQUIRE(model.trees.size() == 1);
    const auto& root = model.trees[0].nodes[0];
    REQUIRE(root.feature >= 0);

    // oracle works on centered targets (the boosting residual after F0)
    Eigen::VectorXd residual = y.array() - y.mean();
    const auto o = oracle::best_stump_bruteforce(x, residual);
    REQUIRE(o.found);
    CHECK(root.feature == o.feature);
    CHECK(root.threshold == Catch::Approx(o.threshold).epsilon(1e-12));
    const auto& left = model.trees[0].nodes[static_cast<std::size_t>(root.left)];
    const auto& right = model.trees[0].nodes[static_cast<std::size_t>(root.right)];
    CHECK(left.value == Catch::Approx(o.left_value).epsilon(1e-12));
    CHECK(right.value == Catch::Approx(o.right_value).epsilon(1e-12));
  }
}

TEST_CASE("training MSE is nonincreasing in the number of trees") {
  Rng rng(181);
  Eigen::MatrixXd x = testutil::random_matrix(rng, 30, 4);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i)
    y(i) = 2.0 * x(i, 0) - x(i, 2) + 0.3 * rng.normal();
  GbtConfig cfg;
  cfg.n_trees = 60;
  const auto model = fit_gbt(x, y, cfg);
  REQUIRE(model.stage_train_mse.size() == 60);
  for (std::size_t i = 1; i < model.stage_train_mse.size(); ++i)
    CHECK(model.stage_train_mse[i] <= model.stage_train_mse[i - 1] + 1e-12);
}

TEST_CASE("predictions invariant under feature permutation with remapping") {
  Rng rng(191);
  Eigen::MatrixXd x = testutil::random_matrix(rng, 25, 5);
  Eigen::VectorXd y(25);
  for (int i = 0; i < 25; ++i)
    y(i) = std::sin(3.0 * x(i, 1)) + x(i, 3) + 0.1 * rng.normal();

  const std::vector<int> perm = {3, 0, 4, 1, 2}; // permuted column j = original perm[j]
  Eigen::MatrixXd xp(25, 5);
  for (int j = 0; j < 5; ++j) xp.col(j) = x.col(perm[j]);

  GbtConfig cfg;
  cfg.n_trees = 40;
  const auto base = fit_gbt(x, y, cfg);
  const auto permuted = fit_gbt(xp, y, cfg);
  for (int i = 0; i < 25; ++i) {
    const double a = base.predict_row(x.row(i));
    const double b = permuted.predict_row(xp.row(i));
    CHECK(a == Catch::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("gbt validation") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Random(3);
  CHECK_THROWS_AS(fit_gbt(x, y), validation_error);
  GbtConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = GbtConfig{};
  bad.n_trees = 0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("loo_cv constant target gives zero error") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 3);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(8, -1.5);
  const auto report = loo_cv(x, y);
  CHECK(report.n_splits == 8);
  CHECK(report.mse_mean == 0.0);
  CHECK(report.mse_spread == 0.0);
}

TEST_CASE("loo_cv trains one model per row and beats the mean predictor on a linear target") {
  Rng rng(193);
  Eigen::MatrixXd x = testutil::random_matrix(rng, 16, 2);
  Eigen::VectorXd y(16);
  for (int i = 0; i < 16; ++i) y(i) = 10.0 * x(i, 0) + 4.0 * x(i, 1);

  GbtConfig cfg;
  cfg.n_trees = 200;
  cfg.max_depth = 3;
  const auto report = loo_cv(x, y, cfg);
  REQUIRE(report.per_split_sq_errors.size() == 16);

  const double var_y = (y.array() - y.mean()).square().sum() / 16.0;
  CHECK(report.mse_mean < var_y);

  // mse_mean really is the mean of the per-split squared errors
  double mean = 0.0;
  for (double e : report.per_split_sq_errors) mean += e;
  CHECK(report.mse_mean == Catch::Approx(mean / 16.0).epsilon(1e-12));
}

TEST_CASE("loo_cv requires at least 3 rows") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Random(2);
  CHECK_THROWS_AS(loo_cv(x, y), validation_error);
}
