#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "traitlab/util/errors.hpp"

namespace traitlab::stats {

struct IccResult {
  double icc = 0.0;
  double ms_rows = 0.0;  // between subjects
  double ms_cols = 0.0;  // between raters
  double ms_error = 0.0; // residual
  int k = 0;             // raters
  int n = 0;             // subjects
};

// ICC(2,k): two-way random effects, absolute agreement, average of k raters
// (Shrout-Fleiss). m is subjects x raters, complete.
//
//   ICC(2,k) = (MS_R - MS_E) / (MS_R + (MS_C - MS_E)/n)
inline IccResult icc2k(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  const auto k = m.cols();
  if (n < 2 || k < 2)
    throw validation_error("icc2k: need at least 2 subjects and 2 raters");
  if (!m.allFinite())
    throw validation_error("icc2k: rating matrix has missing or non-finite cells");

  const double grand = m.mean();
  const Eigen::VectorXd row_means = m.rowwise().mean();
  const Eigen::RowVectorXd col_means = m.colwise().mean();

  const double ss_rows =
      static_cast<double>(k) * (row_means.array() - grand).square().sum();
  const double ss_cols =
      static_cast<double>(n) * (col_means.array() - grand).square().sum();
  const double ss_total = (m.array() - grand).square().sum();
  const double ss_error = ss_total - ss_rows - ss_cols;

  IccResult r;
  r.n = static_cast<int>(n);
  r.k = static_cast<int>(k);
  r.ms_rows = ss_rows / static_cast<double>(n - 1);
  r.ms_cols = ss_cols / static_cast<double>(k - 1);
  r.ms_error = std::max(0.0, ss_error) / static_cast<double>((n - 1) * (k - 1));

  const double denom = r.ms_rows + (r.ms_cols - r.ms_error) / static_cast<double>(n);
  if (denom == 0.0)
    throw numeric_error("icc2k: undefined, MS_R + (MS_C - MS_E)/n = 0");
  r.icc = (r.ms_rows - r.ms_error) / denom;
  return r;
}

} // namespace traitlab::stats
