#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "traitlab/util/errors.hpp"
#include "traitlab/util/rng.hpp"

namespace traitlab::stats {

struct PseudoFResult {
  double f = 0.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  int df_between = 0; // a - 1
  int df_within = 0;  // N - a
  bool degenerate = false; // ss_within == 0: perfect separation, f = +inf
};

namespace detail {

struct GroupLayout {
  int n_groups = 0;
  std::vector<int> sizes;
};

inline GroupLayout check_labels(const Eigen::MatrixXd& points,
                                const std::vector<int>& labels) {
  if (points.rows() == 0 || points.cols() == 0)
    throw validation_error("pseudo_f: empty point matrix");
  if (static_cast<std::size_t>(points.rows()) != labels.size())
    throw validation_error("pseudo_f: labels and points disagree in length");
  if (!points.allFinite())
    throw validation_error("pseudo_f: non-finite coordinates");
  int a = 0;
  for (int l : labels) {
    if (l < 0) throw validation_error("pseudo_f: negative group label");
    a = std::max(a, l + 1);
  }
  GroupLayout layout;
  layout.n_groups = a;
  layout.sizes.assign(static_cast<std::size_t>(a), 0);
  for (int l : labels) ++layout.sizes[static_cast<std::size_t>(l)];
  for (int s : layout.sizes)
    if (s == 0) throw validation_error("pseudo_f: empty group");
  if (a < 2) throw validation_error("pseudo_f: need at least 2 groups");
  if (points.rows() <= a)
    throw validation_error("pseudo_f: need N > number of groups");
  return layout;
}

// Core computation without label re-validation; used by the permutation loop.
inline PseudoFResult pseudo_f_unchecked(const Eigen::MatrixXd& points,
                                        const std::vector<int>& labels,
                                        int n_groups) {
  const auto N = points.rows();
  const auto d = points.cols();

  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(n_groups, d);
  std::vector<double> counts(static_cast<std::size_t>(n_groups), 0.0);
  for (Eigen::Index i = 0; i < N; ++i) {
    means.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += 1.0;
  }
  Eigen::RowVectorXd grand = means.colwise().sum() / static_cast<double>(N);
  for (int g = 0; g < n_groups; ++g)
    means.row(g) /= counts[static_cast<std::size_t>(g)];

  double ss_within = 0.0;
  for (Eigen::Index i = 0; i < N; ++i)
    ss_within += (points.row(i) - means.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  double ss_between = 0.0;
  for (int g = 0; g < n_groups; ++g)
    ss_between += counts[static_cast<std::size_t>(g)] * (means.row(g) - grand).squaredNorm();

  PseudoFResult r;
  r.ss_between = ss_between;
  r.ss_within = ss_within;
  r.df_between = n_groups - 1;
  r.df_within = static_cast<int>(N) - n_groups;
  if (ss_within == 0.0 && ss_between == 0.0)
    throw numeric_error("pseudo_f: no variance, all points identical");
  if (ss_within == 0.0) {
    r.f = std::numeric_limits<double>::infinity();
    r.degenerate = true;
  } else {
    r.f = (ss_between / r.df_between) / (ss_within / r.df_within);
  }
  return r;
}

} // namespace detail

// F = (SS_A/(a-1)) / (SS_W/(N-a)) with Euclidean distances to group means.
// SS_W sums squared member-to-centroid distances within each group; SS_A
// sums n_g * squared centroid-to-grand-centroid distances.
inline PseudoFResult pseudo_f(const Eigen::MatrixXd& points,
                              const std::vector<int>& labels) {
  const auto layout = detail::check_labels(points, labels);
  return detail::pseudo_f_unchecked(points, labels, layout.n_groups);
}

// Number of distinct label sequences N!/(n_1! ... n_a!), saturating at `cap`.
inline std::size_t label_assignment_count(const std::vector<int>& labels,
                                          std::size_t cap) {
  std::vector<int> sizes;
  for (int l : labels) {
    if (l >= static_cast<int>(sizes.size())) sizes.resize(static_cast<std::size_t>(l) + 1, 0);
    ++sizes[static_cast<std::size_t>(l)];
  }
  // product of binomials C(remaining, n_g)
  long double total = 1.0L;
  int remaining = static_cast<int>(labels.size());
  for (int s : sizes) {
    for (int i = 1; i <= s; ++i) {
      total = total * static_cast<long double>(remaining) / static_cast<long double>(i);
      --remaining;
      if (total > static_cast<long double>(cap) * 4.0L)
        return cap + 1; // saturated
    }
  }
  const auto rounded = static_cast<std::size_t>(std::llround(static_cast<double>(total)));
  return rounded > cap ? cap + 1 : rounded;
}

struct PermanovaResult {
  double f_observed = 0.0;
  double p_value = 1.0;
  std::size_t n_permutations = 0;       // == permutation_f.size()
  std::vector<double> permutation_f;    // excludes the observed labelling
  double ss_between = 0.0;
  double ss_within = 0.0;
  int df_between = 0;
  int df_within = 0;
  bool exact = false;      // full enumeration instead of Monte Carlo
  bool degenerate = false; // observed ss_within == 0
};

inline constexpr std::size_t kExactEnumerationLimit = 100000;

// Anderson-style label permutation around the pseudo-F statistic. When the
// number of distinct label assignments is at most kExactEnumerationLimit the
// test enumerates all of them (the observed one contributes the +1);
// otherwise it draws `n_permutations` uniform shuffles. Either way
// p = (1 + #{F_perm >= F_obs}) / (1 + #permutations), so p can never be 0.
// Every permutation derives its own RNG stream from (seed, index), making
// the result independent of evaluation order.
inline PermanovaResult permanova(const Eigen::MatrixXd& points,
                                 const std::vector<int>& labels,
                                 std::size_t n_permutations,
                                 std::uint64_t seed) {
  if (n_permutations < 1)
    throw validation_error("permanova: n_permutations must be >= 1");
  const auto layout = detail::check_labels(points, labels);
  const PseudoFResult obs =
      detail::pseudo_f_unchecked(points, labels, layout.n_groups);

  PermanovaResult result;
  result.f_observed = obs.f;
  result.ss_between = obs.ss_between;
  result.ss_within = obs.ss_within;
  result.df_between = obs.df_between;
  result.df_within = obs.df_within;
  result.degenerate = obs.degenerate;

  const std::size_t n_distinct =
      label_assignment_count(labels, kExactEnumerationLimit);
  std::size_t count_ge = 0;

  if (n_distinct <= kExactEnumerationLimit) {
    result.exact = true;
    std::vector<int> perm = labels;
    std::sort(perm.begin(), perm.end());
    bool skipped_observed = false;
    do {
      if (!skipped_observed && perm == labels) {
        skipped_observed = true;
        continue;
      }
      const PseudoFResult pr =
          detail::pseudo_f_unchecked(points, perm, layout.n_groups);
      result.permutation_f.push_back(pr.f);
      if (pr.f >= obs.f) ++count_ge;
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    result.permutation_f.reserve(n_permutations);
    for (std::size_t i = 0; i < n_permutations; ++i) {
      Rng rng(derive_seed(seed, i));
      std::vector<int> perm = labels;
      rng.shuffle(perm);
      const PseudoFResult pr =
          detail::pseudo_f_unchecked(points, perm, layout.n_groups);
      result.permutation_f.push_back(pr.f);
      if (pr.f >= obs.f) ++count_ge;
    }
  }

  result.n_permutations = result.permutation_f.size();
  result.p_value = static_cast<double>(1 + count_ge) /
                   static_cast<double>(1 + result.n_permutations);
  return result;
}

} // namespace traitlab::stats
