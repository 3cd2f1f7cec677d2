#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "traitlab/predict/loo.hpp"
#include "traitlab/stats/anova.hpp"
#include "traitlab/stats/icc.hpp"
#include "traitlab/stats/permanova.hpp"
#include "traitlab/stats/sphericity.hpp"
#include "traitlab/stats/tost.hpp"
#include "traitlab/stats/ttest.hpp"
#include "traitlab/util/format.hpp"

namespace traitlab::cli {

// JSON cannot represent infinities; degenerate statistics serialize as null.
inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline nlohmann::json to_json(const stats::PermanovaResult& r) {
  return {{"f_observed", json_number(r.f_observed)},
          {"p_value", r.p_value},
          {"n_permutations", r.n_permutations},
          {"ss_between", r.ss_between},
          {"ss_within", r.ss_within},
          {"df_between", r.df_between},
          {"df_within", r.df_within},
          {"exact", r.exact},
          {"degenerate", r.degenerate}};
}

// Plot-ready histogram of the permutation statistics.
inline nlohmann::json permutation_histogram(const std::vector<double>& values,
                                            double f_observed, int n_bins = 40) {
  std::vector<double> finite;
  finite.reserve(values.size());
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  const std::size_t n_infinite = values.size() - finite.size();

  nlohmann::json out;
  out["n_infinite"] = n_infinite;
  out["f_observed"] = json_number(f_observed);
  if (finite.empty()) {
    out["bin_edges"] = nlohmann::json::array();
    out["counts"] = nlohmann::json::array();
    return out;
  }
  double lo = *std::min_element(finite.begin(), finite.end());
  double hi = *std::max_element(finite.begin(), finite.end());
  if (hi <= lo) hi = lo + 1.0;
  std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i)
    edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n_bins;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_bins), 0);
  for (double v : finite) {
    auto bin = static_cast<int>((v - lo) / (hi - lo) * n_bins);
    bin = std::clamp(bin, 0, n_bins - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  out["bin_edges"] = edges;
  out["counts"] = counts;
  return out;
}

inline nlohmann::json to_json(const stats::IccResult& r) {
  return {{"icc", r.icc},       {"ms_rows", r.ms_rows}, {"ms_cols", r.ms_cols},
          {"ms_error", r.ms_error}, {"k", r.k},         {"n", r.n}};
}

inline nlohmann::json to_json(const stats::TostResult& r) {
  return {{"bound", r.bound},
          {"t_lower", json_number(r.t_lower)},
          {"t_upper", json_number(r.t_upper)},
          {"p_lower", r.p_lower},
          {"p_upper", r.p_upper},
          {"df", r.df},
          {"equivalent", r.equivalent},
          {"degenerate", r.degenerate}};
}

inline nlohmann::json to_json(const stats::SphericityResult& r) {
  return {{"mauchly_w", r.mauchly_w},
          {"chi2", json_number(r.chi2)},
          {"df", r.df},
          {"p_value", r.p_value},
          {"gg_epsilon", r.gg_epsilon},
          {"singular", r.singular}};
}

inline nlohmann::json to_json(const stats::AnovaResult& r) {
  nlohmann::json j{{"f", json_number(r.f)},
                   {"df1", r.df1},
                   {"df2", r.df2},
                   {"p_value", r.p_value},
                   {"degenerate", r.degenerate},
                   {"summary", format_f_report(r.f, r.p_value)}};
  j["epsilon_applied"] =
      r.epsilon_applied ? nlohmann::json(*r.epsilon_applied) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const stats::TTestResult& r) {
  return {{"t", json_number(r.t)},
          {"df", r.df},
          {"p_value", r.p_value},
          {"paired", r.paired},
          {"degenerate", r.degenerate}};
}

inline nlohmann::json to_json(const predict::LooReport& r) {
  return {{"per_split_sq_errors", r.per_split_sq_errors},
          {"mse_mean", r.mse_mean},
          {"mse_spread", r.mse_spread},
          {"n_splits", r.n_splits},
          {"summary", format_mse_report(r.mse_mean, r.mse_spread)}};
}

} // namespace traitlab::cli
