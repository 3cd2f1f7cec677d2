#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "traitlab/util/csv.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::io {

// Dense per-modality feature matrix: `t_s` column followed by the feature
// columns, one file per (session, participant, modality).
struct FeatureSeries {
  std::vector<double> t; // strictly increasing
  Eigen::MatrixXd features;
};

inline FeatureSeries read_feature_csv_file(const std::string& path) {
  const CsvTable csv = read_csv_file(path);
  if (csv.header.empty() || csv.header[0] != "t_s")
    throw validation_error(path + ": first column must be 't_s'");
  const auto dim = static_cast<Eigen::Index>(csv.header.size()) - 1;
  if (dim < 1) throw validation_error(path + ": no feature columns");
  if (csv.rows.empty()) throw validation_error(path + ": no feature rows");

  FeatureSeries out;
  out.features.resize(static_cast<Eigen::Index>(csv.rows.size()), dim);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::string ctx = path + " row " + std::to_string(r + 2);
    const double t = parse_double(csv.rows[r][0], ctx);
    if (!out.t.empty() && !(t > out.t.back()))
      throw validation_error(ctx + ": t_s must be strictly increasing");
    out.t.push_back(t);
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double v =
          parse_double(csv.rows[r][static_cast<std::size_t>(c) + 1], ctx);
      if (!std::isfinite(v)) throw validation_error(ctx + ": non-finite feature");
      out.features(static_cast<Eigen::Index>(r), c) = v;
    }
  }
  return out;
}

// Rows of the sessions manifest consumed by the traits command.
struct SessionsEntry {
  std::string group_id, session_id, task_label, participant_id;
};

inline std::vector<SessionsEntry> read_sessions_csv_file(const std::string& path) {
  const CsvTable csv = read_csv_file(path);
  const int g = csv.require_column("group_id", path);
  const int s = csv.require_column("session_id", path);
  const int t = csv.require_column("task_label", path);
  const int p = csv.require_column("participant_id", path);
  std::vector<SessionsEntry> out;
  for (const auto& row : csv.rows)
    out.push_back({row[static_cast<std::size_t>(g)], row[static_cast<std::size_t>(s)],
                   row[static_cast<std::size_t>(t)], row[static_cast<std::size_t>(p)]});
  if (out.empty()) throw validation_error(path + ": no session rows");
  return out;
}

} // namespace traitlab::io
