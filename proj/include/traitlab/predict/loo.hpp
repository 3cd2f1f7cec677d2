#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "traitlab/core/session.hpp"
#include "traitlab/core/traits.hpp"
#include "traitlab/predict/gbt.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::predict {

struct LooReport {
  std::vector<double> per_split_sq_errors;
  double mse_mean = 0.0;
  double mse_spread = 0.0; // sample std (ddof=1) of per-split squared errors
  int n_splits = 0;
};

// Leave-one-out cross-validation: one model per held-out row, squared error
// on that row. Splits are independent; evaluation order cannot matter.
inline LooReport loo_cv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const GbtConfig& cfg = {}) {
  cfg.validate();
  if (x.rows() != y.size())
    throw validation_error("loo_cv: feature rows and targets disagree");
  const auto n = x.rows();
  if (n < 3) throw validation_error("loo_cv: need at least 3 rows");

  LooReport report;
  report.n_splits = static_cast<int>(n);
  for (Eigen::Index held = 0; held < n; ++held) {
    Eigen::MatrixXd xt(n - 1, x.cols());
    Eigen::VectorXd yt(n - 1);
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == held) continue;
      xt.row(at) = x.row(i);
      yt(at) = y(i);
      ++at;
    }
    const auto model = fit_gbt(xt, yt, cfg);
    const double err = model.predict_row(x.row(held)) - y(held);
    report.per_split_sq_errors.push_back(err * err);
  }

  double mean = 0.0;
  for (double e : report.per_split_sq_errors) mean += e;
  mean /= static_cast<double>(n);
  report.mse_mean = mean;
  double ss = 0.0;
  for (double e : report.per_split_sq_errors) ss += (e - mean) * (e - mean);
  report.mse_spread = std::sqrt(ss / static_cast<double>(n - 1));
  return report;
}

enum class PredictorSource { perceived, self_report };
enum class TraitRepresentation { big5, meta };

inline const char* source_name(PredictorSource s) {
  return s == PredictorSource::perceived ? "perceived" : "self_report";
}

inline const char* representation_name(TraitRepresentation r) {
  return r == TraitRepresentation::big5 ? "big5" : "meta";
}

struct PredictorRun {
  PredictorSource source = PredictorSource::perceived;
  TraitRepresentation representation = TraitRepresentation::big5;
  LooReport report;
};

struct PredictorComparison {
  std::vector<PredictorRun> runs; // 4 with self-reports, 2 without
  std::vector<std::string> group_order;
};

namespace detail {

// Per-group feature rows: group averages of per-participant session-average
// traits. A participant's samples are pooled across all of their rows first.
inline std::map<std::string, core::TraitVector> group_mean_traits(
    const core::SessionTable& table) {
  std::map<std::string, std::map<std::string, core::TraitTrajectory>> pooled;
  for (const auto& row : table.rows) {
    auto& tr = pooled[row.group_id][row.participant_id];
    tr.participant_id = row.participant_id;
    for (const auto& s : row.trajectory.samples) tr.samples.push_back(s);
  }
  std::map<std::string, core::TraitVector> out;
  for (auto& [gid, members] : pooled) {
    std::vector<core::TraitVector> member_means;
    for (auto& [pid, tr] : members) {
      if (tr.samples.empty())
        throw validation_error("compare_predictors: participant '" + pid +
                               "' in group '" + gid + "' has no snapshots");
      member_means.push_back(core::session_average(tr));
    }
    out[gid] = core::group_average(member_means);
  }
  return out;
}

inline Eigen::MatrixXd feature_matrix(
    const std::vector<std::string>& groups,
    const std::map<std::string, core::TraitVector>& means,
    TraitRepresentation rep) {
  const int dim = rep == TraitRepresentation::big5 ? core::kTraitCount : 2;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(groups.size()), dim);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& t = means.at(groups[g]);
    if (rep == TraitRepresentation::big5) {
      for (int i = 0; i < core::kTraitCount; ++i)
        x(static_cast<Eigen::Index>(g), i) = t[i];
    } else {
      const auto m = core::meta_traits_unchecked(t);
      x(static_cast<Eigen::Index>(g), 0) = m.plasticity;
      x(static_cast<Eigen::Index>(g), 1) = m.stability;
    }
  }
  return x;
}

} // namespace detail

// The four regression runs of the performance analysis:
// {perceived, self-report} x {big-five, meta-traits}. Self-report runs are
// skipped when no self-reports are supplied.
inline PredictorComparison compare_predictors(
    const core::SessionTable& table,
    const std::optional<std::map<std::string, core::TraitVector>>& self_reports,
    const GbtConfig& cfg = {}) {
  PredictorComparison result;
  result.group_order = table.group_ids();
  const auto& groups = result.group_order;

  Eigen::VectorXd y(static_cast<Eigen::Index>(groups.size()));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto it = table.performance.find(groups[g]);
    if (it == table.performance.end())
      throw validation_error("compare_predictors: missing performance score for group '" +
                             groups[g] + "'");
    y(static_cast<Eigen::Index>(g)) = it->second;
  }

  const auto perceived = detail::group_mean_traits(table);

  std::optional<std::map<std::string, core::TraitVector>> self_means;
  if (self_reports) {
    // group averages of the per-participant self-reports, using the table's
    // group membership
    std::map<std::string, std::vector<core::TraitVector>> members;
    std::map<std::string, std::set<std::string>> seen;
    for (const auto& row : table.rows) {
      if (!seen[row.group_id].insert(row.participant_id).second) continue;
      const auto it = self_reports->find(row.participant_id);
      if (it == self_reports->end())
        throw validation_error("compare_predictors: no self-report for participant '" +
                               row.participant_id + "'");
      members[row.group_id].push_back(it->second);
    }
    std::map<std::string, core::TraitVector> sm;
    for (const auto& [gid, list] : members) sm[gid] = core::group_average(list);
    self_means = std::move(sm);
  }

  for (const auto source : {PredictorSource::perceived, PredictorSource::self_report}) {
    if (source == PredictorSource::self_report && !self_means) continue;
    const auto& means = source == PredictorSource::perceived ? perceived : *self_means;
    for (const auto rep : {TraitRepresentation::big5, TraitRepresentation::meta}) {
      PredictorRun run;
      run.source = source;
      run.representation = rep;
      run.report = loo_cv(detail::feature_matrix(groups, means, rep), y, cfg);
      result.runs.push_back(std::move(run));
    }
  }
  return result;
}

} // namespace traitlab::predict
