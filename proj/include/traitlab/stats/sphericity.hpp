#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "traitlab/stats/special.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::stats {

struct SphericityResult {
  double mauchly_w = 1.0;
  double chi2 = 0.0;
  int df = 0;
  double p_value = 1.0;
  double gg_epsilon = 1.0;
  bool singular = false; // contrast covariance not full rank, W pinned to 0
};

namespace detail {

// Normalized Helmert contrasts: (k-1) orthonormal rows, each orthogonal to
// the all-ones vector. Any orthonormal contrast basis gives the same W and
// epsilon (orthogonal similarity), this one is conventional.
inline Eigen::MatrixXd helmert_contrasts(int k) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k - 1, k);
  for (int i = 0; i < k - 1; ++i) {
    for (int j = 0; j <= i; ++j) c(i, j) = 1.0;
    c(i, i + 1) = -static_cast<double>(i + 1);
    c.row(i) /= c.row(i).norm();
  }
  return c;
}

// Covariance (ddof = n-1) of the columns of data.
inline Eigen::MatrixXd column_covariance(const Eigen::MatrixXd& data) {
  const auto n = data.rows();
  Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

// Eigenvalues of the orthonormal-contrast covariance, ascending, clamped at
// zero (tiny negatives are eigensolver noise).
inline Eigen::VectorXd contrast_eigenvalues(const Eigen::MatrixXd& data) {
  const int k = static_cast<int>(data.cols());
  const Eigen::MatrixXd c = helmert_contrasts(k);
  const Eigen::MatrixXd s_c = c * column_covariance(data) * c.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s_c);
  if (es.info() != Eigen::Success)
    throw numeric_error("sphericity: eigendecomposition failed");
  return es.eigenvalues().cwiseMax(0.0);
}

// Greenhouse-Geisser epsilon from contrast-covariance eigenvalues:
// (sum lambda)^2 / ((k-1) * sum lambda^2). Zero eigenvalues are retained.
// Degenerate all-zero spectrum counts as spherical (epsilon = 1).
inline double gg_epsilon_from_eigenvalues(const Eigen::VectorXd& lambda) {
  const double s1 = lambda.sum();
  const double s2 = lambda.squaredNorm();
  if (s2 == 0.0) return 1.0;
  return s1 * s1 / (static_cast<double>(lambda.size()) * s2);
}

} // namespace detail

// Mauchly's W with the chi-square approximation (Box correction factor) and
// the Greenhouse-Geisser epsilon, both computed on the covariance of k-1
// orthonormal contrasts. data is subjects x conditions, complete.
//
//   W = det(S_c) / (tr(S_c)/(k-1))^(k-1),  df = k(k-1)/2 - 1
//   chi2 = -(n-1) * (1 - (2p^2+p+2)/(6p(n-1))) * ln W,  p = k-1
inline SphericityResult mauchly_gg(const Eigen::MatrixXd& data) {
  const auto n = data.rows();
  const auto k = data.cols();
  if (k < 3)
    throw validation_error("mauchly_gg: need at least 3 conditions (sphericity is trivial at k = 2)");
  if (n < 2) throw validation_error("mauchly_gg: need at least 2 subjects");
  if (!data.allFinite())
    throw validation_error("mauchly_gg: matrix has missing or non-finite cells");

  const Eigen::VectorXd lambda = detail::contrast_eigenvalues(data);
  const auto p = static_cast<double>(k - 1);

  SphericityResult r;
  r.df = static_cast<int>(k * (k - 1) / 2 - 1);
  r.gg_epsilon = detail::gg_epsilon_from_eigenvalues(lambda);

  const double trace = lambda.sum();
  if (trace == 0.0) {
    // no variance in any contrast: trivially spherical
    r.mauchly_w = 1.0;
    r.chi2 = 0.0;
    r.p_value = 1.0;
    return r;
  }

  double log_det = 0.0;
  bool singular = false;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) <= 0.0) {
      singular = true;
      break;
    }
    log_det += std::log(lambda(i));
  }

  if (singular) {
    r.singular = true;
    r.mauchly_w = 0.0;
    r.chi2 = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }

  const double log_w = log_det - p * std::log(trace / p);
  r.mauchly_w = std::exp(std::min(0.0, log_w)); // numeric guard: W <= 1
  const double box = 1.0 - (2.0 * p * p + p + 2.0) /
                               (6.0 * p * static_cast<double>(n - 1));
  r.chi2 = std::max(0.0, -static_cast<double>(n - 1) * box * log_w);
  r.p_value = chi_squared_sf(r.chi2, static_cast<double>(r.df));
  return r;
}

} // namespace traitlab::stats
