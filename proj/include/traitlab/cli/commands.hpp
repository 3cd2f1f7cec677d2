#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "traitlab/cli/manifest.hpp"
#include "traitlab/cli/reports.hpp"
#include "traitlab/core/session.hpp"
#include "traitlab/core/traits.hpp"
#include "traitlab/core/window.hpp"
#include "traitlab/io/feature_csv.hpp"
#include "traitlab/io/ratings.hpp"
#include "traitlab/io/trait_csv.hpp"
#include "traitlab/predict/loo.hpp"
#include "traitlab/stats/anova.hpp"
#include "traitlab/stats/holm.hpp"
#include "traitlab/stats/icc.hpp"
#include "traitlab/stats/permanova.hpp"
#include "traitlab/stats/sphericity.hpp"
#include "traitlab/stats/tost.hpp"
#include "traitlab/stats/ttest.hpp"
#include "traitlab/synth/generate.hpp"
#include "traitlab/util/errors.hpp"
#include "traitlab/xmodal/model.hpp"
#include "traitlab/xmodal/serialize.hpp"

namespace traitlab::cli {

inline void write_json_file(const nlohmann::json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw validation_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// synth

struct SynthCommand {
  synth::SynthConfig cfg;
  std::string out = "synthetic_traits.csv";
  std::string performance_out; // optional
  std::string timestamp;
};

inline nlohmann::json synth_config_json(const synth::SynthConfig& c) {
  return {{"n_groups", c.n_groups},
          {"group_size_min", c.group_size_min},
          {"group_size_max", c.group_size_max},
          {"session_length_s", c.session_length_s},
          {"snapshot_s", c.snapshot_s},
          {"sigma_between", c.sigma_between},
          {"sigma_within", c.sigma_within},
          {"sigma_time", c.sigma_time},
          {"ar_coefficient", c.ar_coefficient},
          {"missing_fraction", c.missing_fraction},
          {"n_tasks", c.n_tasks},
          {"with_performance", c.with_performance},
          {"performance_noise_std", c.performance_noise_std},
          {"seed", c.seed}};
}

inline nlohmann::json run_synth(SynthCommand cmd) {
  if (!cmd.performance_out.empty()) cmd.cfg.with_performance = true;
  const auto table = synth::gen_sessions(cmd.cfg);
  io::write_trait_csv_file(cmd.out, table);
  if (!cmd.performance_out.empty())
    io::write_performance_csv_file(cmd.performance_out, table.performance);

  nlohmann::json config = synth_config_json(cmd.cfg);
  config["out"] = cmd.out;
  config["performance_out"] = cmd.performance_out;
  auto manifest = make_manifest("synth", config, {}, cmd.cfg.seed, cmd.timestamp);
  manifest["outputs"] = nlohmann::json::object();
  manifest["outputs"][cmd.out] = to_hex(file_checksum(cmd.out));
  if (!cmd.performance_out.empty())
    manifest["outputs"][cmd.performance_out] =
        to_hex(file_checksum(cmd.performance_out));
  write_json_file(manifest, cmd.out + ".manifest.json");
  return manifest;
}

// ---------------------------------------------------------------------------
// traits: window features, run the model per stride, average into snapshots

struct TraitsCommand {
  std::string features_dir;
  std::string sessions_csv; // defaults to <features_dir>/sessions.csv
  std::string params_file;
  core::WindowConfig window;
  std::string out = "traits.csv";
  std::string predictions_out; // optional per-stride predictions
  std::string timestamp;
};

inline nlohmann::json run_traits(const TraitsCommand& cmd) {
  cmd.window.validate();
  const std::string sessions_path =
      cmd.sessions_csv.empty() ? cmd.features_dir + "/sessions.csv"
                               : cmd.sessions_csv;
  const auto entries = io::read_sessions_csv_file(sessions_path);
  const auto params = xmodal::load_params(cmd.params_file);

  std::vector<std::pair<std::string, std::string>> inputs = {
      {sessions_path, "sessions"}, {cmd.params_file, "params"}};

  core::SessionTable snapshots_table;
  core::SessionTable predictions_table;
  static const char* kModNames[3] = {"acoustic", "textual", "visual"};

  for (const auto& entry : entries) {
    std::array<io::FeatureSeries, 3> series;
    for (int m = 0; m < 3; ++m) {
      const std::string path = cmd.features_dir + "/" + entry.session_id + "__" +
                               entry.participant_id + "__" + kModNames[m] + ".csv";
      if (!std::filesystem::exists(path))
        throw validation_error("missing feature file for (session '" +
                               entry.session_id + "', participant '" +
                               entry.participant_id + "', modality '" +
                               kModNames[m] + "'): " + path);
      series[static_cast<std::size_t>(m)] = io::read_feature_csv_file(path);
      if (series[static_cast<std::size_t>(m)].features.cols() !=
          params.hyper.input_dim(m))
        throw validation_error(path + ": feature dimension " +
                               std::to_string(series[static_cast<std::size_t>(m)].features.cols()) +
                               " does not match the model (" +
                               std::to_string(params.hyper.input_dim(m)) + ")");
      inputs.push_back({path, entry.session_id + "/" + entry.participant_id +
                                  "/" + kModNames[m]});
    }

    // window span: all modalities must cover a window for it to count
    double t0 = series[0].t.front();
    double t_end = series[0].t.back();
    std::array<double, 3> step{};
    for (int m = 0; m < 3; ++m) {
      const auto& t = series[static_cast<std::size_t>(m)].t;
      t0 = std::max(t0, t.front());
      double dt = cmd.window.stride_s;
      if (t.size() > 1) dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
      step[static_cast<std::size_t>(m)] = dt;
      t_end = std::min(t_end, t.back() + dt);
    }

    std::vector<core::TraitSample> preds;
    for (double t = t0; t + cmd.window.window_s <= t_end + 1e-9;
         t += cmd.window.stride_s) {
      std::array<xmodal::ModalitySequence, 3> slices;
      bool covered = true;
      for (int m = 0; m < 3; ++m) {
        const auto& s = series[static_cast<std::size_t>(m)];
        Eigen::Index lo = 0, hi = 0; // [lo, hi) row range inside the window
        while (lo < static_cast<Eigen::Index>(s.t.size()) &&
               s.t[static_cast<std::size_t>(lo)] < t - 1e-9)
          ++lo;
        hi = lo;
        while (hi < static_cast<Eigen::Index>(s.t.size()) &&
               s.t[static_cast<std::size_t>(hi)] < t + cmd.window.window_s - 1e-9)
          ++hi;
        if (hi == lo) {
          covered = false;
          break;
        }
        slices[static_cast<std::size_t>(m)] =
            xmodal::ModalitySequence{static_cast<xmodal::Modality>(m),
                                     s.features.middleRows(lo, hi - lo)};
      }
      if (!covered) continue;
      const auto traits =
          xmodal::forward(slices[0], slices[1], slices[2], params);
      preds.push_back({t, traits});
    }

    core::SessionRow snap_row{entry.group_id, entry.session_id, entry.task_label,
                              entry.participant_id,
                              core::snapshot_series(preds, cmd.window,
                                                    entry.participant_id)};
    snapshots_table.rows.push_back(std::move(snap_row));
    if (!cmd.predictions_out.empty()) {
      core::SessionRow pred_row{entry.group_id, entry.session_id,
                                entry.task_label, entry.participant_id,
                                core::TraitTrajectory{entry.participant_id, preds}};
      predictions_table.rows.push_back(std::move(pred_row));
    }
  }

  io::write_trait_csv_file(cmd.out, snapshots_table);
  if (!cmd.predictions_out.empty())
    io::write_trait_csv_file(cmd.predictions_out, predictions_table);

  nlohmann::json config = {{"features_dir", cmd.features_dir},
                           {"sessions_csv", sessions_path},
                           {"params_file", cmd.params_file},
                           {"window_s", cmd.window.window_s},
                           {"stride_s", cmd.window.stride_s},
                           {"snapshot_s", cmd.window.snapshot_s},
                           {"out", cmd.out},
                           {"predictions_out", cmd.predictions_out}};
  auto manifest =
      make_manifest("traits", config, inputs, params.hyper.seed, cmd.timestamp);
  manifest["outputs"] = nlohmann::json::object();
  manifest["outputs"][cmd.out] = to_hex(file_checksum(cmd.out));
  if (!cmd.predictions_out.empty())
    manifest["outputs"][cmd.predictions_out] =
        to_hex(file_checksum(cmd.predictions_out));
  write_json_file(manifest, cmd.out + ".manifest.json");
  return manifest;
}

// ---------------------------------------------------------------------------
// shared helpers for the analysis commands

namespace detail {

// Session-average trait vector per (group, participant) within a slice of
// rows; a participant's samples are pooled across sessions first.
struct UnitPoints {
  std::vector<std::string> group_of; // per point
  std::vector<core::TraitVector> traits;
};

inline UnitPoints participant_points(const std::vector<const core::SessionRow*>& rows) {
  std::map<std::pair<std::string, std::string>, core::TraitTrajectory> pooled;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto* row : rows) {
    const auto key = std::make_pair(row->group_id, row->participant_id);
    if (!pooled.count(key)) order.push_back(key);
    auto& tr = pooled[key];
    for (const auto& s : row->trajectory.samples) tr.samples.push_back(s);
  }
  UnitPoints out;
  for (const auto& key : order) {
    const auto& tr = pooled[key];
    if (tr.samples.empty()) continue; // participant with no snapshots: skip
    out.group_of.push_back(key.first);
    core::TraitTrajectory named = tr;
    named.participant_id = key.second;
    out.traits.push_back(core::session_average(named));
  }
  return out;
}

inline Eigen::MatrixXd points_matrix(const std::vector<core::TraitVector>& traits,
                                     bool meta, bool normalize) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(traits.size()),
                      meta ? 2 : core::kTraitCount);
  for (std::size_t i = 0; i < traits.size(); ++i) {
    if (meta) {
      auto m = core::meta_traits_unchecked(traits[i]);
      if (normalize) m = core::normalize_meta(m);
      pts(static_cast<Eigen::Index>(i), 0) = m.plasticity;
      pts(static_cast<Eigen::Index>(i), 1) = m.stability;
    } else {
      for (int t = 0; t < core::kTraitCount; ++t)
        pts(static_cast<Eigen::Index>(i), t) = traits[i][t];
    }
  }
  return pts;
}

// value of one dependent variable (trait or meta-trait) for a trait vector
inline double variable_value(const core::TraitVector& t, const std::string& variable,
                             bool normalize_meta) {
  for (int i = 0; i < core::kTraitCount; ++i)
    if (variable == core::kTraitNames[static_cast<std::size_t>(i)]) return t[i];
  auto m = core::meta_traits_unchecked(t);
  if (normalize_meta) m = core::normalize_meta(m);
  if (variable == core::kMetaTraitNames[0]) return m.plasticity;
  if (variable == core::kMetaTraitNames[1]) return m.stability;
  throw validation_error("unknown dependent variable '" + variable + "'");
}

} // namespace detail

// ---------------------------------------------------------------------------
// cluster: per-task PERMANOVA on participant session averages

struct ClusterCommand {
  std::string input_csv;
  std::string traits = "big5"; // big5 | meta
  bool normalize_meta = false;
  std::size_t permutations = 10000;
  std::uint64_t seed = 0;
  bool by_task = false;
  std::string out; // empty -> stdout
  std::string timestamp;
};

inline nlohmann::json run_cluster(const ClusterCommand& cmd) {
  if (cmd.traits != "big5" && cmd.traits != "meta")
    throw validation_error("cluster: --traits must be big5 or meta");
  if (cmd.permutations < 1)
    throw validation_error("cluster: --permutations must be >= 1");
  const auto table = io::read_trait_csv_file(cmd.input_csv);

  std::map<std::string, std::vector<const core::SessionRow*>> slices;
  if (cmd.by_task) {
    for (const auto& row : table.rows) slices[row.task_label].push_back(&row);
  } else {
    for (const auto& row : table.rows) slices[""].push_back(&row);
  }

  nlohmann::json tasks = nlohmann::json::array();
  nlohmann::json warnings = nlohmann::json::array();
  std::size_t slice_index = 0;
  for (const auto& [task, rows] : slices) {
    const auto points = detail::participant_points(rows);
    std::vector<std::string> groups;
    {
      std::set<std::string> gs(points.group_of.begin(), points.group_of.end());
      groups.assign(gs.begin(), gs.end());
    }
    if (groups.size() < 2) {
      warnings.push_back({{"code", "skipped_too_few_groups"},
                          {"task", task},
                          {"message", "task '" + task +
                                          "' has fewer than 2 groups; skipped"}});
      ++slice_index;
      continue;
    }
    std::vector<int> labels;
    for (const auto& g : points.group_of)
      labels.push_back(static_cast<int>(
          std::lower_bound(groups.begin(), groups.end(), g) - groups.begin()));

    const auto pts = detail::points_matrix(points.traits, cmd.traits == "meta",
                                           cmd.normalize_meta);
    nlohmann::json record{{"task", task},
                          {"n_groups", groups.size()},
                          {"n_points", pts.rows()}};
    try {
      const auto result = stats::permanova(pts, labels, cmd.permutations,
                                           derive_seed(cmd.seed, slice_index));
      record["permanova"] = to_json(result);
      record["histogram"] =
          permutation_histogram(result.permutation_f, result.f_observed);
      record["summary"] = format_f_report(result.f_observed, result.p_value);
      tasks.push_back(std::move(record));
    } catch (const std::exception& e) {
      warnings.push_back({{"code", "skipped_degenerate"},
                          {"task", task},
                          {"message", e.what()}});
    }
    ++slice_index;
  }

  const nlohmann::json config = {{"input", cmd.input_csv},
                                 {"traits", cmd.traits},
                                 {"normalize_meta", cmd.normalize_meta},
                                 {"permutations", cmd.permutations},
                                 {"seed", cmd.seed},
                                 {"by_task", cmd.by_task}};
  nlohmann::json report{
      {"report", "cluster"},
      {"manifest", make_manifest("cluster", config, {{cmd.input_csv, "traits"}},
                                 cmd.seed, cmd.timestamp)},
      {"trait_set", cmd.traits},
      {"tasks", tasks},
      {"warnings", warnings}};
  write_json_file(report, cmd.out);
  return report;
}

// ---------------------------------------------------------------------------
// agreement: ICC(2,k) per variable plus per-rater TOST equivalence

struct AgreementCommand {
  std::string ratings_csv;
  std::string predictions_csv;
  double alpha = 0.05;
  std::string tost_mode = "paired"; // paired | independent
  std::string out;
  std::string timestamp;
};

inline nlohmann::json run_agreement(const AgreementCommand& cmd) {
  if (cmd.tost_mode != "paired" && cmd.tost_mode != "independent")
    throw validation_error("agreement: --tost-mode must be paired or independent");
  if (!(cmd.alpha > 0.0 && cmd.alpha < 1.0))
    throw validation_error("agreement: --alpha must lie in (0,1)");

  const auto ratings = io::read_ratings_csv_file(cmd.ratings_csv);
  const auto predictions =
      io::read_predictions_csv_file(cmd.predictions_csv, ratings.subjects);
  const bool paired = cmd.tost_mode == "paired";

  nlohmann::json variables = nlohmann::json::array();
  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& name : io::rating_variable_names()) {
    const auto& m = ratings.matrices.at(name);
    const auto n = m.rows();
    const auto k = m.cols();

    const Eigen::VectorXd item_mean = m.rowwise().mean();
    // bound: mean absolute rater error for this variable
    double bound = 0.0;
    for (Eigen::Index s = 0; s < n; ++s)
      for (Eigen::Index r = 0; r < k; ++r)
        bound += std::abs(m(s, r) - item_mean(s));
    bound /= static_cast<double>(n * k);

    nlohmann::json entry{{"variable", name},
                         {"icc", to_json(stats::icc2k(m))},
                         {"bound", bound},
                         {"n_raters", k},
                         {"n_subjects", n}};

    std::vector<double> err_model(static_cast<std::size_t>(n));
    const auto& pred = predictions.at(name);
    for (Eigen::Index s = 0; s < n; ++s)
      err_model[static_cast<std::size_t>(s)] = std::abs(pred(s) - item_mean(s));

    nlohmann::json per_rater = nlohmann::json::array();
    int equivalent_count = 0;
    if (bound > 0.0) {
      for (Eigen::Index r = 0; r < k; ++r) {
        std::vector<double> err_rater(static_cast<std::size_t>(n));
        for (Eigen::Index s = 0; s < n; ++s)
          err_rater[static_cast<std::size_t>(s)] = std::abs(m(s, r) - item_mean(s));
        const auto tost = stats::tost_equivalence(err_model, err_rater, bound,
                                                  cmd.alpha, paired);
        auto j = to_json(tost);
        j["rater"] = ratings.raters[static_cast<std::size_t>(r)];
        if (tost.equivalent) ++equivalent_count;
        per_rater.push_back(std::move(j));
      }
    } else {
      warnings.push_back({{"code", "tost_skipped_zero_bound"},
                          {"variable", name},
                          {"message", "raters agree exactly on '" + name +
                                          "'; the equivalence bound is 0"}});
    }
    entry["tost_per_rater"] = per_rater;
    entry["equivalent_raters"] = equivalent_count;
    variables.push_back(std::move(entry));
  }

  const nlohmann::json config = {{"ratings", cmd.ratings_csv},
                                 {"predictions", cmd.predictions_csv},
                                 {"alpha", cmd.alpha},
                                 {"tost_mode", cmd.tost_mode}};
  nlohmann::json report{
      {"report", "agreement"},
      {"manifest", make_manifest("agreement", config,
                                 {{cmd.ratings_csv, "ratings"},
                                  {cmd.predictions_csv, "predictions"}},
                                 0, cmd.timestamp)},
      {"alpha", cmd.alpha},
      {"tost_mode", cmd.tost_mode},
      {"variables", variables},
      {"warnings", warnings}};
  write_json_file(report, cmd.out);
  return report;
}

// ---------------------------------------------------------------------------
// tasks: repeated-measures battery across task labels

struct TasksCommand {
  std::string input_csv;
  std::string level = "individual"; // individual | group
  std::string posthoc = "welch";    // welch | paired
  bool normalize_meta = false;
  std::string out;
  std::string timestamp;
};

inline nlohmann::json run_tasks(const TasksCommand& cmd) {
  if (cmd.level != "individual" && cmd.level != "group")
    throw validation_error("tasks: --level must be individual or group");
  if (cmd.posthoc != "welch" && cmd.posthoc != "paired")
    throw validation_error("tasks: --posthoc must be welch or paired");

  const auto table = io::read_trait_csv_file(cmd.input_csv);
  const auto tasks = table.task_labels();
  const auto k = static_cast<Eigen::Index>(tasks.size());
  if (k < 2)
    throw validation_error("tasks: need at least 2 distinct task labels, found " +
                           std::to_string(k));

  // per (unit, task) trait vector
  std::map<std::string, std::map<std::string, core::TraitVector>> unit_task;
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    std::vector<const core::SessionRow*> rows;
    for (const auto& row : table.rows)
      if (row.task_label == tasks[ti]) rows.push_back(&row);
    const auto points = detail::participant_points(rows);

    if (cmd.level == "individual") {
      // unit key: group-qualified participant id, unique across groups
      std::map<std::pair<std::string, std::string>, core::TraitTrajectory> pooled;
      for (const auto* row : rows) {
        auto& tr = pooled[{row->group_id, row->participant_id}];
        for (const auto& s : row->trajectory.samples) tr.samples.push_back(s);
      }
      for (auto& [key, tr] : pooled) {
        if (tr.samples.empty()) continue;
        tr.participant_id = key.second;
        unit_task[key.first + "/" + key.second][tasks[ti]] =
            core::session_average(tr);
      }
    } else {
      std::map<std::string, std::vector<core::TraitVector>> group_members;
      for (std::size_t i = 0; i < points.traits.size(); ++i)
        group_members[points.group_of[i]].push_back(points.traits[i]);
      for (const auto& [gid, members] : group_members)
        unit_task[gid][tasks[ti]] = core::group_average(members);
    }
  }

  // complete within-subject design: drop units missing any task
  std::vector<std::string> units;
  int dropped = 0;
  for (const auto& [unit, by_task] : unit_task) {
    if (static_cast<Eigen::Index>(by_task.size()) == k)
      units.push_back(unit);
    else
      ++dropped;
  }
  const auto n = static_cast<Eigen::Index>(units.size());
  if (n < 2)
    throw validation_error("tasks: fewer than 2 units observed in every task");

  std::vector<std::string> variables = io::rating_variable_names();
  nlohmann::json var_reports = nlohmann::json::array();
  for (const auto& variable : variables) {
    Eigen::MatrixXd data(n, k);
    for (Eigen::Index u = 0; u < n; ++u)
      for (Eigen::Index t = 0; t < k; ++t)
        data(u, t) = detail::variable_value(
            unit_task[units[static_cast<std::size_t>(u)]][tasks[static_cast<std::size_t>(t)]],
            variable, cmd.normalize_meta);

    nlohmann::json entry{{"variable", variable}};
    bool gg = false;
    if (k >= 3) {
      const auto mauchly = stats::mauchly_gg(data);
      entry["mauchly"] = to_json(mauchly);
      gg = mauchly.p_value < 0.05;
    } else {
      entry["mauchly"] = nullptr;
      entry["mauchly_note"] = "sphericity trivial at k=2, test disabled";
    }
    const auto anova = stats::rm_anova(
        data, gg ? stats::AnovaCorrection::greenhouse_geisser
                 : stats::AnovaCorrection::none);
    auto anova_json = to_json(anova);
    anova_json["gg_applied"] = gg;
    entry["anova"] = std::move(anova_json);

    // post-hoc pairwise tests with Holm adjustment
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = a + 1; b < k; ++b) pairs.push_back({a, b});
    std::vector<double> raw_p;
    std::vector<stats::TTestResult> results;
    for (const auto& [a, b] : pairs) {
      std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
      for (Eigen::Index u = 0; u < n; ++u) {
        x[static_cast<std::size_t>(u)] = data(u, a);
        y[static_cast<std::size_t>(u)] = data(u, b);
      }
      const auto r = cmd.posthoc == "welch" ? stats::welch_t(x, y)
                                            : stats::paired_t(x, y);
      raw_p.push_back(r.p_value);
      results.push_back(r);
    }
    const auto adjusted = stats::holm_adjust(raw_p);
    nlohmann::json posthoc = nlohmann::json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto j = to_json(results[i]);
      j["pair"] = {tasks[static_cast<std::size_t>(pairs[i].first)],
                   tasks[static_cast<std::size_t>(pairs[i].second)]};
      j["p_holm"] = adjusted[i];
      posthoc.push_back(std::move(j));
    }
    entry["posthoc"] = std::move(posthoc);
    var_reports.push_back(std::move(entry));
  }

  const nlohmann::json config = {{"input", cmd.input_csv},
                                 {"level", cmd.level},
                                 {"posthoc", cmd.posthoc},
                                 {"normalize_meta", cmd.normalize_meta}};
  nlohmann::json report{
      {"report", "tasks"},
      {"manifest", make_manifest("tasks", config, {{cmd.input_csv, "traits"}}, 0,
                                 cmd.timestamp)},
      {"level", cmd.level},
      {"posthoc", cmd.posthoc},
      {"tasks", tasks},
      {"n_units", n},
      {"n_dropped_incomplete", dropped},
      {"variables", var_reports}};
  write_json_file(report, cmd.out);
  return report;
}

// ---------------------------------------------------------------------------
// predict: group-performance regression comparison

struct PredictCommand {
  std::string input_csv;
  std::string performance_csv;
  std::string self_report_csv; // optional
  bool rescale_self_reports = false;
  predict::GbtConfig gbt;
  std::string out;
  std::string timestamp;
};

inline nlohmann::json run_predict(const PredictCommand& cmd) {
  auto table = io::read_trait_csv_file(cmd.input_csv);
  table.validate();
  table.performance = io::read_performance_csv_file(cmd.performance_csv);

  std::optional<std::map<std::string, core::TraitVector>> self_reports;
  if (!cmd.self_report_csv.empty())
    self_reports = io::read_self_report_csv_file(cmd.self_report_csv,
                                                 cmd.rescale_self_reports);

  const auto comparison =
      predict::compare_predictors(table, self_reports, cmd.gbt);

  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : comparison.runs) {
    auto j = to_json(run.report);
    j["source"] = predict::source_name(run.source);
    j["representation"] = predict::representation_name(run.representation);
    j["features_per_group"] =
        run.representation == predict::TraitRepresentation::big5 ? 5 : 2;
    runs.push_back(std::move(j));
  }

  nlohmann::json config = {{"input", cmd.input_csv},
                           {"performance", cmd.performance_csv},
                           {"self_reports", cmd.self_report_csv},
                           {"rescale_self_reports", cmd.rescale_self_reports},
                           {"n_trees", cmd.gbt.n_trees},
                           {"max_depth", cmd.gbt.max_depth},
                           {"learning_rate", cmd.gbt.learning_rate},
                           {"min_samples_leaf", cmd.gbt.min_samples_leaf},
                           {"seed", cmd.gbt.seed}};
  std::vector<std::pair<std::string, std::string>> inputs = {
      {cmd.input_csv, "traits"}, {cmd.performance_csv, "performance"}};
  if (!cmd.self_report_csv.empty())
    inputs.push_back({cmd.self_report_csv, "self_reports"});

  nlohmann::json report{
      {"report", "predict"},
      {"manifest",
       make_manifest("predict", config, inputs, cmd.gbt.seed, cmd.timestamp)},
      {"groups", comparison.group_order},
      {"spread_interpretation",
       "sample standard deviation (ddof=1) of per-split squared errors across "
       "leave-one-out splits"},
      {"runs", runs}};
  write_json_file(report, cmd.out);
  return report;
}

} // namespace traitlab::cli
