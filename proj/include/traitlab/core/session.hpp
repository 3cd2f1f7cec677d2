#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "traitlab/core/traits.hpp"
#include "traitlab/core/window.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::core {

// Per-trait mean over the snapshots that are present; gaps carry no weight.
inline TraitVector session_average(const TraitTrajectory& tr) {
  if (tr.samples.empty())
    throw validation_error("session_average: no data (empty trajectory, participant '" +
                           tr.participant_id + "')");
  TraitVector mean;
  for (const auto& s : tr.samples)
    for (int t = 0; t < kTraitCount; ++t) mean[t] += s.traits[t];
  for (int t = 0; t < kTraitCount; ++t)
    mean[t] /= static_cast<double>(tr.samples.size());
  return mean;
}

inline TraitVector group_average(const std::vector<TraitVector>& members) {
  if (members.empty()) throw validation_error("group_average: no data (empty member list)");
  TraitVector mean;
  for (const auto& m : members)
    for (int t = 0; t < kTraitCount; ++t) mean[t] += m[t];
  for (int t = 0; t < kTraitCount; ++t)
    mean[t] /= static_cast<double>(members.size());
  return mean;
}

struct SessionRow {
  std::string group_id;
  std::string session_id;
  std::string task_label; // empty when the corpus has no task structure
  std::string participant_id;
  TraitTrajectory trajectory;
};

// Participants grouped into sessions/groups, with optional per-group
// performance scores.
struct SessionTable {
  std::vector<SessionRow> rows;
  std::map<std::string, double> performance; // group_id -> score

  // (session_id, participant_id) must be unique and every group must have at
  // least two distinct participants.
  void validate() const {
    std::set<std::pair<std::string, std::string>> seen;
    std::map<std::string, std::set<std::string>> members;
    for (const auto& r : rows) {
      if (!seen.insert({r.session_id, r.participant_id}).second)
        throw validation_error("SessionTable: duplicate (session '" + r.session_id +
                               "', participant '" + r.participant_id + "')");
      members[r.group_id].insert(r.participant_id);
    }
    for (const auto& [gid, m] : members)
      if (m.size() < 2)
        throw validation_error("SessionTable: group '" + gid +
                               "' has fewer than 2 participants");
  }

  std::vector<std::string> group_ids() const {
    std::set<std::string> s;
    for (const auto& r : rows) s.insert(r.group_id);
    return {s.begin(), s.end()};
  }

  std::vector<std::string> task_labels() const {
    std::set<std::string> s;
    for (const auto& r : rows) s.insert(r.task_label);
    return {s.begin(), s.end()};
  }
};

} // namespace traitlab::core
