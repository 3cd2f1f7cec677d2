#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "traitlab/stats/special.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::stats {

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool paired = false;
  bool degenerate = false; // zero variance with equal means
};

namespace detail {

inline double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_variance(const std::vector<double>& x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size() - 1);
}

} // namespace detail

// Welch's unequal-variance t-test, two-sided, Welch-Satterthwaite df.
inline TTestResult welch_t(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() < 2 || y.size() < 2)
    throw validation_error("welch_t: need at least 2 observations per sample");
  const auto n1 = static_cast<double>(x.size());
  const auto n2 = static_cast<double>(y.size());
  const double m1 = detail::mean_of(x);
  const double m2 = detail::mean_of(y);
  const double v1 = detail::sample_variance(x, m1);
  const double v2 = detail::sample_variance(y, m2);

  TTestResult r;
  r.paired = false;
  const double se2 = v1 / n1 + v2 / n2;
  if (se2 == 0.0) {
    if (m1 == m2) {
      r.t = 0.0;
      r.df = n1 + n2 - 2.0;
      r.p_value = 1.0;
      r.degenerate = true;
      return r;
    }
    r.t = m1 > m2 ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
    r.df = n1 + n2 - 2.0;
    r.p_value = 0.0;
    r.degenerate = true;
    return r;
  }
  r.t = (m1 - m2) / std::sqrt(se2);
  r.df = se2 * se2 /
         ((v1 / n1) * (v1 / n1) / (n1 - 1.0) + (v2 / n2) * (v2 / n2) / (n2 - 1.0));
  r.p_value = student_t_two_sided_p(r.t, r.df);
  return r;
}

// Paired (dependent) t-test on elementwise differences, two-sided.
inline TTestResult paired_t(const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (x.size() != y.size())
    throw validation_error("paired_t: samples must have equal length");
  if (x.size() < 2)
    throw validation_error("paired_t: need at least 2 pairs");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const auto n = static_cast<double>(d.size());
  const double md = detail::mean_of(d);
  const double vd = detail::sample_variance(d, md);

  TTestResult r;
  r.paired = true;
  r.df = n - 1.0;
  if (vd == 0.0) {
    if (md == 0.0) {
      r.t = 0.0;
      r.p_value = 1.0;
      r.degenerate = true;
      return r;
    }
    r.t = md > 0.0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    r.degenerate = true;
    return r;
  }
  r.t = md / std::sqrt(vd / n);
  r.p_value = student_t_two_sided_p(r.t, r.df);
  return r;
}

} // namespace traitlab::stats
