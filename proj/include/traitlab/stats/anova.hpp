#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "traitlab/stats/special.hpp"
#include "traitlab/stats/sphericity.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::stats {

enum class AnovaCorrection { none, greenhouse_geisser };

struct AnovaResult {
  double f = 0.0;
  double df1 = 0.0; // epsilon * (k-1) when corrected
  double df2 = 0.0; // epsilon * (n-1)(k-1) when corrected
  double p_value = 1.0;
  std::optional<double> epsilon_applied;
  double ss_conditions = 0.0;
  double ss_subjects = 0.0;
  double ss_error = 0.0;
  bool degenerate = false; // MS_error == 0
};

// One-way repeated-measures ANOVA from the two-way (subject x condition)
// decomposition. data is subjects x conditions, complete.
inline AnovaResult rm_anova(const Eigen::MatrixXd& data,
                            AnovaCorrection correction = AnovaCorrection::none) {
  const auto n = data.rows();
  const auto k = data.cols();
  if (n < 2 || k < 2)
    throw validation_error("rm_anova: need at least 2 subjects and 2 conditions");
  if (!data.allFinite())
    throw validation_error("rm_anova: matrix has missing or non-finite cells");

  const double grand = data.mean();
  const Eigen::VectorXd subject_means = data.rowwise().mean();
  const Eigen::RowVectorXd condition_means = data.colwise().mean();

  AnovaResult r;
  r.ss_subjects =
      static_cast<double>(k) * (subject_means.array() - grand).square().sum();
  r.ss_conditions =
      static_cast<double>(n) * (condition_means.array() - grand).square().sum();
  const double ss_total = (data.array() - grand).square().sum();
  r.ss_error = std::max(0.0, ss_total - r.ss_subjects - r.ss_conditions);

  const double df_cond = static_cast<double>(k - 1);
  const double df_err = static_cast<double>((n - 1) * (k - 1));
  const double ms_cond = r.ss_conditions / df_cond;
  double ms_err = r.ss_error / df_err;
  // cancellation dust from the subtraction above counts as zero
  if (r.ss_error <= 1e-12 * ss_total) {
    r.ss_error = 0.0;
    ms_err = 0.0;
  }

  double epsilon = 1.0;
  if (correction == AnovaCorrection::greenhouse_geisser) {
    epsilon = detail::gg_epsilon_from_eigenvalues(detail::contrast_eigenvalues(data));
    r.epsilon_applied = epsilon;
  }
  r.df1 = epsilon * df_cond;
  r.df2 = epsilon * df_err;

  if (ms_err == 0.0) {
    r.degenerate = true;
    if (ms_cond == 0.0) {
      r.f = 0.0;
      r.p_value = 1.0;
    } else {
      r.f = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }

  r.f = ms_cond / ms_err;
  r.p_value = f_sf(r.f, r.df1, r.df2);
  return r;
}

} // namespace traitlab::stats
