#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "traitlab/stats/special.hpp"
#include "traitlab/stats/ttest.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::stats {

struct TostResult {
  double bound = 0.0;
  double t_lower = 0.0; // tests H0: mu_diff <= -bound
  double t_upper = 0.0; // tests H0: mu_diff >= +bound
  double p_lower = 1.0;
  double p_upper = 1.0;
  double df = 0.0;
  bool equivalent = false; // both one-sided p below alpha
  bool degenerate = false; // zero-variance input
};

// Two one-sided tests for equivalence of means within +-bound. Paired mode
// works on elementwise differences; unpaired mode uses Welch statistics for
// both one-sided tests.
inline TostResult tost_equivalence(const std::vector<double>& err_model,
                                   const std::vector<double>& err_rater,
                                   double bound, double alpha, bool paired) {
  if (!(bound > 0.0)) throw validation_error("tost_equivalence: bound must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw validation_error("tost_equivalence: alpha must be in (0,1)");
  if (paired && err_model.size() != err_rater.size())
    throw validation_error("tost_equivalence: paired mode requires equal lengths");
  if (err_model.size() < 2 || err_rater.size() < 2)
    throw validation_error("tost_equivalence: need at least 2 observations per sample");

  TostResult r;
  r.bound = bound;

  double mean_diff = 0.0;
  double se = 0.0;
  if (paired) {
    std::vector<double> d(err_model.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = err_model[i] - err_rater[i];
    const auto n = static_cast<double>(d.size());
    mean_diff = detail::mean_of(d);
    const double vd = detail::sample_variance(d, mean_diff);
    se = std::sqrt(vd / n);
    r.df = n - 1.0;
  } else {
    const auto n1 = static_cast<double>(err_model.size());
    const auto n2 = static_cast<double>(err_rater.size());
    const double m1 = detail::mean_of(err_model);
    const double m2 = detail::mean_of(err_rater);
    const double v1 = detail::sample_variance(err_model, m1);
    const double v2 = detail::sample_variance(err_rater, m2);
    mean_diff = m1 - m2;
    const double se2 = v1 / n1 + v2 / n2;
    se = std::sqrt(se2);
    r.df = se2 == 0.0 ? n1 + n2 - 2.0
                      : se2 * se2 / ((v1 / n1) * (v1 / n1) / (n1 - 1.0) +
                                     (v2 / n2) * (v2 / n2) / (n2 - 1.0));
  }

  if (se == 0.0) {
    r.degenerate = true;
    const double inf = std::numeric_limits<double>::infinity();
    r.t_lower = mean_diff > -bound ? inf : (mean_diff < -bound ? -inf : 0.0);
    r.t_upper = mean_diff < bound ? -inf : (mean_diff > bound ? inf : 0.0);
    r.p_lower = mean_diff > -bound ? 0.0 : (mean_diff < -bound ? 1.0 : 0.5);
    r.p_upper = mean_diff < bound ? 0.0 : (mean_diff > bound ? 1.0 : 0.5);
    r.equivalent = r.p_lower < alpha && r.p_upper < alpha;
    return r;
  }

  r.t_lower = (mean_diff + bound) / se;
  r.t_upper = (mean_diff - bound) / se;
  r.p_lower = 1.0 - student_t_cdf(r.t_lower, r.df); // reject for large t_lower
  r.p_upper = student_t_cdf(r.t_upper, r.df);       // reject for small t_upper
  r.equivalent = r.p_lower < alpha && r.p_upper < alpha;
  return r;
}

} // namespace traitlab::stats
