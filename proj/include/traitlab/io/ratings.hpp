#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "traitlab/core/traits.hpp"
#include "traitlab/util/csv.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::io {

// Long-format ratings: rater_id,subject_id,trait,score. Complete per trait
// (every rater scored every subject); meta-trait columns are derived from the
// five raw traits per rater.
struct RatingsData {
  std::vector<std::string> raters;   // sorted
  std::vector<std::string> subjects; // sorted
  // trait name (5 raw + plasticity + stability) -> subjects x raters matrix
  std::map<std::string, Eigen::MatrixXd> matrices;
};

inline std::vector<std::string> rating_variable_names() {
  std::vector<std::string> names(core::kTraitNames.begin(), core::kTraitNames.end());
  names.insert(names.end(), core::kMetaTraitNames.begin(), core::kMetaTraitNames.end());
  return names;
}

inline RatingsData read_ratings_csv_file(const std::string& path) {
  const CsvTable csv = read_csv_file(path);
  const int rcol = csv.require_column("rater_id", path);
  const int scol = csv.require_column("subject_id", path);
  const int tcol = csv.require_column("trait", path);
  const int vcol = csv.require_column("score", path);

  const std::set<std::string> valid_traits(core::kTraitNames.begin(),
                                           core::kTraitNames.end());
  std::map<std::tuple<std::string, std::string, std::string>, double> cells;
  std::set<std::string> raters, subjects;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::string ctx = path + " row " + std::to_string(r + 2);
    const auto& rater = csv.rows[r][static_cast<std::size_t>(rcol)];
    const auto& subject = csv.rows[r][static_cast<std::size_t>(scol)];
    const auto& trait = csv.rows[r][static_cast<std::size_t>(tcol)];
    if (!valid_traits.count(trait))
      throw validation_error(ctx + ": unknown trait '" + trait + "'");
    const double score = parse_double(csv.rows[r][static_cast<std::size_t>(vcol)], ctx);
    if (!std::isfinite(score))
      throw validation_error(ctx + ": non-finite score");
    if (!cells.emplace(std::make_tuple(rater, subject, trait), score).second)
      throw validation_error(ctx + ": duplicate (rater '" + rater + "', subject '" +
                             subject + "', trait '" + trait + "')");
    raters.insert(rater);
    subjects.insert(subject);
  }

  RatingsData data;
  data.raters.assign(raters.begin(), raters.end());
  data.subjects.assign(subjects.begin(), subjects.end());
  const auto n = static_cast<Eigen::Index>(data.subjects.size());
  const auto k = static_cast<Eigen::Index>(data.raters.size());
  if (n == 0 || k == 0) throw validation_error(path + ": no ratings");

  std::vector<std::string> missing;
  for (const auto* trait : core::kTraitNames) {
    Eigen::MatrixXd m(n, k);
    for (Eigen::Index s = 0; s < n; ++s)
      for (Eigen::Index r = 0; r < k; ++r) {
        const auto it = cells.find(std::make_tuple(
            data.raters[static_cast<std::size_t>(r)],
            data.subjects[static_cast<std::size_t>(s)], std::string(trait)));
        if (it == cells.end()) {
          missing.push_back(data.raters[static_cast<std::size_t>(r)] + "/" +
                            data.subjects[static_cast<std::size_t>(s)] + "/" + trait);
          continue;
        }
        m(s, r) = it->second;
      }
    data.matrices[trait] = std::move(m);
  }
  if (!missing.empty()) {
    std::string msg = path + ": incomplete rating matrix, missing cells:";
    const std::size_t show = std::min<std::size_t>(missing.size(), 10);
    for (std::size_t i = 0; i < show; ++i) msg += " " + missing[i];
    if (missing.size() > show)
      msg += " (+" + std::to_string(missing.size() - show) + " more)";
    throw validation_error(msg);
  }

  // derived meta-trait ratings per rater: unit-weight sums
  data.matrices[core::kMetaTraitNames[0]] =
      data.matrices["openness"] + data.matrices["extraversion"];
  data.matrices[core::kMetaTraitNames[1]] = data.matrices["conscientiousness"] +
                                            data.matrices["agreeableness"] +
                                            data.matrices["emotional_stability"];
  return data;
}

// Model predictions: subject_id,trait,score — joined on (subject, trait).
// Returns per variable (5 raw + 2 derived meta) a vector aligned with
// `subjects`.
inline std::map<std::string, Eigen::VectorXd> read_predictions_csv_file(
    const std::string& path, const std::vector<std::string>& subjects) {
  const CsvTable csv = read_csv_file(path);
  const int scol = csv.require_column("subject_id", path);
  const int tcol = csv.require_column("trait", path);
  const int vcol = csv.require_column("score", path);

  const std::set<std::string> valid_traits(core::kTraitNames.begin(),
                                           core::kTraitNames.end());
  std::map<std::pair<std::string, std::string>, double> cells;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::string ctx = path + " row " + std::to_string(r + 2);
    const auto& subject = csv.rows[r][static_cast<std::size_t>(scol)];
    const auto& trait = csv.rows[r][static_cast<std::size_t>(tcol)];
    if (!valid_traits.count(trait))
      throw validation_error(ctx + ": unknown trait '" + trait + "'");
    const double score = parse_double(csv.rows[r][static_cast<std::size_t>(vcol)], ctx);
    if (!cells.emplace(std::make_pair(subject, trait), score).second)
      throw validation_error(ctx + ": duplicate (subject '" + subject + "', trait '" +
                             trait + "')");
  }

  std::map<std::string, Eigen::VectorXd> out;
  for (const auto* trait : core::kTraitNames) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(subjects.size()));
    for (std::size_t s = 0; s < subjects.size(); ++s) {
      const auto it = cells.find(std::make_pair(subjects[s], std::string(trait)));
      if (it == cells.end())
        throw validation_error(path + ": missing prediction for subject '" +
                               subjects[s] + "', trait '" + trait + "'");
      v(static_cast<Eigen::Index>(s)) = it->second;
    }
    out[trait] = std::move(v);
  }
  out[core::kMetaTraitNames[0]] = out["openness"] + out["extraversion"];
  out[core::kMetaTraitNames[1]] =
      out["conscientiousness"] + out["agreeableness"] + out["emotional_stability"];
  return out;
}

} // namespace traitlab::io
