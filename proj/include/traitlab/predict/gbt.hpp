#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "traitlab/util/errors.hpp"

namespace traitlab::predict {

struct GbtConfig {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_leaf = 1;
  std::uint64_t seed = 0; // recorded in reports; the fit itself is deterministic

  void validate() const {
    if (n_trees < 1) throw validation_error("GbtConfig: n_trees must be >= 1");
    if (max_depth < 1) throw validation_error("GbtConfig: max_depth must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw validation_error("GbtConfig: learning_rate must be in (0,1]");
    if (min_samples_leaf < 1)
      throw validation_error("GbtConfig: min_samples_leaf must be >= 1");
  }
};

struct TreeNode {
  int feature = -1; // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0; // leaf prediction
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const Eigen::RowVectorXd& x) const {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(at)];
      at = x(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(at)].value;
  }
};

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
  bool found = false;
};

// Variance-minimizing split over all features and midpoints between
// consecutive distinct values. Ties: lowest feature index, then lowest
// threshold (the scan order below makes that the first strict improvement).
inline SplitChoice best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& r,
                              const std::vector<int>& rows, int min_leaf) {
  SplitChoice best;
  const auto n = static_cast<int>(rows.size());
  std::vector<std::pair<double, double>> vals(static_cast<std::size_t>(n)); // (feature value, residual)
  for (int f = 0; f < x.cols(); ++f) {
    for (int i = 0; i < n; ++i)
      vals[static_cast<std::size_t>(i)] = {x(rows[static_cast<std::size_t>(i)], f),
                                           r(rows[static_cast<std::size_t>(i)])};
    std::sort(vals.begin(), vals.end());

    double sum_left = 0.0, sq_left = 0.0;
    double sum_total = 0.0, sq_total = 0.0;
    for (const auto& [v, y] : vals) {
      sum_total += y;
      sq_total += y * y;
    }
    for (int i = 0; i + 1 < n; ++i) {
      sum_left += vals[static_cast<std::size_t>(i)].second;
      sq_left += vals[static_cast<std::size_t>(i)].second * vals[static_cast<std::size_t>(i)].second;
      if (vals[static_cast<std::size_t>(i)].first ==
          vals[static_cast<std::size_t>(i + 1)].first)
        continue; // no boundary between equal values
      const int n_left = i + 1;
      const int n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double sum_right = sum_total - sum_left;
      const double sq_right = sq_total - sq_left;
      const double sse = (sq_left - sum_left * sum_left / n_left) +
                         (sq_right - sum_right * sum_right / n_right);
      if (sse < best.sse) {
        best.sse = sse;
        best.feature = f;
        best.threshold = 0.5 * (vals[static_cast<std::size_t>(i)].first +
                                vals[static_cast<std::size_t>(i + 1)].first);
        best.found = true;
      }
    }
  }
  return best;
}

inline int grow_tree(RegressionTree& tree, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& r, std::vector<int> rows, int depth,
                     const GbtConfig& cfg) {
  double mean = 0.0;
  for (int i : rows) mean += r(i);
  mean /= static_cast<double>(rows.size());

  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, mean});

  if (depth >= cfg.max_depth ||
      static_cast<int>(rows.size()) < 2 * cfg.min_samples_leaf)
    return node_id;

  const auto split = best_split(x, r, rows, cfg.min_samples_leaf);
  if (!split.found) return node_id;

  std::vector<int> left_rows, right_rows;
  for (int i : rows) {
    if (x(i, split.feature) <= split.threshold)
      left_rows.push_back(i);
    else
      right_rows.push_back(i);
  }

  tree.nodes[static_cast<std::size_t>(node_id)].feature = split.feature;
  tree.nodes[static_cast<std::size_t>(node_id)].threshold = split.threshold;
  const int left = grow_tree(tree, x, r, std::move(left_rows), depth + 1, cfg);
  const int right = grow_tree(tree, x, r, std::move(right_rows), depth + 1, cfg);
  tree.nodes[static_cast<std::size_t>(node_id)].left = left;
  tree.nodes[static_cast<std::size_t>(node_id)].right = right;
  return node_id;
}

} // namespace detail

struct GbtModel {
  GbtConfig cfg;
  double init_value = 0.0; // mean of the training targets
  std::vector<RegressionTree> trees;
  std::vector<double> stage_train_mse; // training MSE after each stage

  double predict_row(const Eigen::RowVectorXd& x) const {
    double out = init_value;
    for (const auto& tree : trees) out += cfg.learning_rate * tree.predict(x);
    return out;
  }

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_row(x.row(i));
    return out;
  }
};

// Stagewise squared-error boosting: each regression tree fits the current
// residuals, predictions accumulate with shrinkage. Stops early once the
// residuals are exactly zero (a constant target needs zero trees).
inline GbtModel fit_gbt(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const GbtConfig& cfg = {}) {
  cfg.validate();
  if (x.rows() != y.size())
    throw validation_error("fit_gbt: feature rows and targets disagree");
  if (x.rows() < 2) throw validation_error("fit_gbt: need at least 2 rows");
  if (!x.allFinite() || !y.allFinite())
    throw validation_error("fit_gbt: non-finite input");

  GbtModel model;
  model.cfg = cfg;
  model.init_value = y.mean();

  Eigen::VectorXd f = Eigen::VectorXd::Constant(y.size(), model.init_value);
  std::vector<int> all_rows(static_cast<std::size_t>(x.rows()));
  for (int i = 0; i < x.rows(); ++i) all_rows[static_cast<std::size_t>(i)] = i;

  for (int t = 0; t < cfg.n_trees; ++t) {
    const Eigen::VectorXd residual = y - f;
    if (residual.squaredNorm() == 0.0) break;

    RegressionTree tree;
    detail::grow_tree(tree, x, residual, all_rows, 0, cfg);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      f(i) += cfg.learning_rate * tree.predict(x.row(i));
    model.trees.push_back(std::move(tree));
    model.stage_train_mse.push_back((y - f).squaredNorm() /
                                    static_cast<double>(y.size()));
  }
  return model;
}

} // namespace traitlab::predict
