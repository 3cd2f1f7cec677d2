#pragma once

#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "traitlab/core/session.hpp"
#include "traitlab/core/traits.hpp"
#include "traitlab/util/csv.hpp"
#include "traitlab/util/errors.hpp"
#include "traitlab/util/format.hpp"

namespace traitlab::io {

inline constexpr const char* kTraitCsvHeader =
    "group_id,session_id,task_label,participant_id,t_start_s,openness,"
    "conscientiousness,extraversion,agreeableness,emotional_stability";

// Trait-window CSV: one row per present snapshot, missing snapshots are
// simply absent rows.
inline void write_trait_csv(std::ostream& out, const core::SessionTable& table) {
  out << kTraitCsvHeader << "\n";
  for (const auto& row : table.rows) {
    for (const auto& s : row.trajectory.samples) {
      out << csv_escape(row.group_id) << ',' << csv_escape(row.session_id) << ','
          << csv_escape(row.task_label) << ',' << csv_escape(row.participant_id)
          << ',' << format_double(s.t_start);
      for (int t = 0; t < core::kTraitCount; ++t)
        out << ',' << format_double(s.traits[t]);
      out << "\n";
    }
  }
}

inline void write_trait_csv_file(const std::string& path,
                                 const core::SessionTable& table) {
  std::ofstream out(path, std::ios::binary); // LF line endings everywhere
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  write_trait_csv(out, table);
  if (!out) throw validation_error("failed writing '" + path + "'");
}

inline core::SessionTable read_trait_csv(std::istream& in, const std::string& name) {
  const CsvTable csv = read_csv(in, name);
  const std::string expected = kTraitCsvHeader;
  std::string got;
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    if (i) got += ',';
    got += csv.header[i];
  }
  if (got != expected)
    throw validation_error(name + ": header mismatch, expected '" + expected + "'");

  core::SessionTable table;
  std::map<std::tuple<std::string, std::string, std::string, std::string>,
           std::size_t>
      index;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& f = csv.rows[r];
    const std::string ctx = name + " row " + std::to_string(r + 2);
    const auto key = std::make_tuple(f[0], f[1], f[2], f[3]);
    auto it = index.find(key);
    if (it == index.end()) {
      core::SessionRow row;
      row.group_id = f[0];
      row.session_id = f[1];
      row.task_label = f[2];
      row.participant_id = f[3];
      row.trajectory.participant_id = f[3];
      index.emplace(key, table.rows.size());
      table.rows.push_back(std::move(row));
      it = index.find(key);
    }
    core::TraitSample sample;
    sample.t_start = parse_double(f[4], ctx);
    for (int t = 0; t < core::kTraitCount; ++t)
      sample.traits[t] = parse_double(f[5 + static_cast<std::size_t>(t)], ctx);
    sample.traits.validate(ctx);
    auto& traj = table.rows[it->second].trajectory;
    if (!traj.samples.empty() && !(sample.t_start > traj.samples.back().t_start))
      throw validation_error(ctx + ": snapshot times must be strictly increasing per participant");
    traj.samples.push_back(sample);
  }
  return table;
}

inline core::SessionTable read_trait_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path);
  return read_trait_csv(in, path);
}

// Performance CSV: group_id,performance_score
inline std::map<std::string, double> read_performance_csv_file(const std::string& path) {
  const CsvTable csv = read_csv_file(path);
  const int gcol = csv.require_column("group_id", path);
  const int pcol = csv.require_column("performance_score", path);
  std::map<std::string, double> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::string ctx = path + " row " + std::to_string(r + 2);
    const auto& gid = csv.rows[r][static_cast<std::size_t>(gcol)];
    if (!out.emplace(gid, parse_double(csv.rows[r][static_cast<std::size_t>(pcol)], ctx)).second)
      throw validation_error(ctx + ": duplicate group '" + gid + "'");
  }
  return out;
}

inline void write_performance_csv_file(const std::string& path,
                                       const std::map<std::string, double>& perf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  out << "group_id,performance_score\n";
  for (const auto& [gid, score] : perf)
    out << csv_escape(gid) << ',' << format_double(score) << "\n";
}

// Self-report CSV: participant_id + the five trait columns, raw scale
// allowed. `rescale` applies per-trait min-max onto [0,1]; constant columns
// map to the midpoint 0.5.
inline std::map<std::string, core::TraitVector> read_self_report_csv_file(
    const std::string& path, bool rescale) {
  const CsvTable csv = read_csv_file(path);
  const int pid = csv.require_column("participant_id", path);
  std::array<int, core::kTraitCount> tcol{};
  for (int t = 0; t < core::kTraitCount; ++t)
    tcol[static_cast<std::size_t>(t)] =
        csv.require_column(core::kTraitNames[static_cast<std::size_t>(t)], path);

  std::vector<std::string> ids;
  std::vector<core::TraitVector> values;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::string ctx = path + " row " + std::to_string(r + 2);
    ids.push_back(csv.rows[r][static_cast<std::size_t>(pid)]);
    core::TraitVector v;
    for (int t = 0; t < core::kTraitCount; ++t) {
      v[t] = parse_double(
          csv.rows[r][static_cast<std::size_t>(tcol[static_cast<std::size_t>(t)])], ctx);
      if (!std::isfinite(v[t]))
        throw validation_error(ctx + ": non-finite self-report score");
    }
    values.push_back(v);
  }

  if (rescale && !values.empty()) {
    for (int t = 0; t < core::kTraitCount; ++t) {
      double lo = values[0][t], hi = values[0][t];
      for (const auto& v : values) {
        lo = std::min(lo, v[t]);
        hi = std::max(hi, v[t]);
      }
      for (auto& v : values)
        v[t] = hi > lo ? (v[t] - lo) / (hi - lo) : 0.5;
    }
  }

  std::map<std::string, core::TraitVector> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    values[i].validate(path + " participant '" + ids[i] + "'");
    if (!out.emplace(ids[i], values[i]).second)
      throw validation_error(path + ": duplicate participant '" + ids[i] + "'");
  }
  return out;
}

} // namespace traitlab::io
