// traitlab: perceived-personality trajectory analysis toolkit.
//
// Subcommands: synth, traits, cluster, agreement, tasks, predict.
// Exit codes: 0 success, 2 validation error, 3 numeric/degenerate error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "traitlab/cli/commands.hpp"

namespace {

void add_timestamp_flag(CLI::App* app, std::string& timestamp) {
  app->add_option("--timestamp", timestamp,
                  "Fix the manifest timestamp (ISO-8601); default is now. Use "
                  "a fixed value for byte-reproducible outputs");
}

int fail(const std::string& cls, const std::string& message, int code) {
  const nlohmann::json err = {{"error", {{"class", cls}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"traitlab: perceived-personality dynamics analysis"};
  app.require_subcommand(1);

  using namespace traitlab;

  // --- synth ---------------------------------------------------------------
  cli::SynthCommand synth_cmd;
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic trait-window CSV under a controlled regime");
  synth->add_option("--groups", synth_cmd.cfg.n_groups, "Number of groups");
  synth->add_option("--group-size-min", synth_cmd.cfg.group_size_min,
                    "Smallest group size");
  synth->add_option("--group-size-max", synth_cmd.cfg.group_size_max,
                    "Largest group size");
  synth->add_option("--session-length", synth_cmd.cfg.session_length_s,
                    "Session length in seconds");
  synth->add_option("--snapshot", synth_cmd.cfg.snapshot_s,
                    "Snapshot period in seconds");
  synth->add_option("--sigma-between", synth_cmd.cfg.sigma_between,
                    "Group-effect std (0 = null regime)");
  synth->add_option("--sigma-within", synth_cmd.cfg.sigma_within,
                    "Individual offset std");
  synth->add_option("--sigma-time", synth_cmd.cfg.sigma_time,
                    "AR(1) innovation std");
  synth->add_option("--ar", synth_cmd.cfg.ar_coefficient,
                    "AR(1) coefficient in [0,1)");
  synth->add_option("--missing", synth_cmd.cfg.missing_fraction,
                    "Fraction of snapshots removed in contiguous runs");
  synth->add_option("--tasks", synth_cmd.cfg.n_tasks,
                    "Tasks per group (labels a, b, ...)");
  synth->add_option("--performance-noise", synth_cmd.cfg.performance_noise_std,
                    "Noise std on the generated performance score");
  synth->add_option("--seed", synth_cmd.cfg.seed, "RNG seed");
  synth->add_option("--out", synth_cmd.out, "Output trait-window CSV path");
  synth->add_option("--performance-out", synth_cmd.performance_out,
                    "Also write a performance CSV to this path");
  add_timestamp_flag(synth, synth_cmd.timestamp);

  // --- traits ----------------------------------------------------------------
  cli::TraitsCommand traits_cmd;
  auto* traits = app.add_subcommand(
      "traits", "Window per-modality features, run the model, emit snapshots");
  traits->add_option("--features-dir", traits_cmd.features_dir,
                     "Directory with <session>__<participant>__<modality>.csv")
      ->required();
  traits->add_option("--sessions", traits_cmd.sessions_csv,
                     "Sessions manifest CSV (default <features-dir>/sessions.csv)");
  traits->add_option("--params", traits_cmd.params_file,
                     "Trained model parameters (binary container)")
      ->required();
  traits->add_option("--window", traits_cmd.window.window_s,
                     "Sliding window length in seconds");
  traits->add_option("--stride", traits_cmd.window.stride_s,
                     "Window stride in seconds");
  traits->add_option("--snapshot", traits_cmd.window.snapshot_s,
                     "Snapshot period in seconds");
  traits->add_option("--out", traits_cmd.out, "Output snapshot CSV path");
  traits->add_option("--predictions-out", traits_cmd.predictions_out,
                     "Also write per-stride predictions to this path");
  add_timestamp_flag(traits, traits_cmd.timestamp);

  // --- cluster ---------------------------------------------------------------
  cli::ClusterCommand cluster_cmd;
  auto* cluster = app.add_subcommand(
      "cluster", "PERMANOVA group-clustering test on session-average traits");
  cluster->add_option("--in", cluster_cmd.input_csv, "Trait-window CSV")->required();
  cluster->add_option("--traits", cluster_cmd.traits, "big5 or meta")
      ->check(CLI::IsMember({"big5", "meta"}));
  cluster->add_flag("--normalize-meta", cluster_cmd.normalize_meta,
                    "Divide meta-traits by their trait counts");
  cluster->add_option("--permutations", cluster_cmd.permutations,
                      "Monte-Carlo permutations (exact enumeration when feasible)");
  cluster->add_option("--seed", cluster_cmd.seed, "RNG seed");
  cluster->add_flag("--by-task", cluster_cmd.by_task,
                    "Run one test per task label");
  cluster->add_option("--out", cluster_cmd.out, "Report path (default stdout)");
  add_timestamp_flag(cluster, cluster_cmd.timestamp);

  // --- agreement ---------------------------------------------------------------
  cli::AgreementCommand agreement_cmd;
  auto* agreement = app.add_subcommand(
      "agreement", "ICC(2,k) rater agreement and model-equivalence TOST");
  agreement->add_option("--ratings", agreement_cmd.ratings_csv,
                        "Ratings CSV (rater_id,subject_id,trait,score)")
      ->required();
  agreement->add_option("--predictions", agreement_cmd.predictions_csv,
                        "Model predictions CSV (subject_id,trait,score)")
      ->required();
  agreement->add_option("--alpha", agreement_cmd.alpha, "Significance level");
  agreement->add_option("--tost-mode", agreement_cmd.tost_mode,
                        "paired or independent")
      ->check(CLI::IsMember({"paired", "independent"}));
  agreement->add_option("--out", agreement_cmd.out, "Report path (default stdout)");
  add_timestamp_flag(agreement, agreement_cmd.timestamp);

  // --- tasks ---------------------------------------------------------------
  cli::TasksCommand tasks_cmd;
  auto* tasks = app.add_subcommand(
      "tasks", "Repeated-measures ANOVA battery across task labels");
  tasks->add_option("--in", tasks_cmd.input_csv, "Trait-window CSV")->required();
  tasks->add_option("--level", tasks_cmd.level, "individual or group")
      ->check(CLI::IsMember({"individual", "group"}));
  tasks->add_option("--posthoc", tasks_cmd.posthoc, "welch or paired")
      ->check(CLI::IsMember({"welch", "paired"}));
  tasks->add_flag("--normalize-meta", tasks_cmd.normalize_meta,
                  "Divide meta-traits by their trait counts");
  tasks->add_option("--out", tasks_cmd.out, "Report path (default stdout)");
  add_timestamp_flag(tasks, tasks_cmd.timestamp);

  // --- predict ---------------------------------------------------------------
  cli::PredictCommand predict_cmd;
  auto* predict = app.add_subcommand(
      "predict", "Group-performance regression: perceived vs self-reported");
  predict->add_option("--in", predict_cmd.input_csv, "Trait-window CSV")->required();
  predict->add_option("--performance", predict_cmd.performance_csv,
                      "Performance CSV (group_id,performance_score)")
      ->required();
  predict->add_option("--self-reports", predict_cmd.self_report_csv,
                      "Self-report CSV (participant_id + five trait columns)");
  predict->add_flag("--rescale-self-reports", predict_cmd.rescale_self_reports,
                    "Min-max rescale self-report traits onto [0,1]");
  predict->add_option("--trees", predict_cmd.gbt.n_trees, "Boosting stages");
  predict->add_option("--depth", predict_cmd.gbt.max_depth, "Tree depth");
  predict->add_option("--learning-rate", predict_cmd.gbt.learning_rate,
                      "Shrinkage in (0,1]");
  predict->add_option("--min-samples-leaf", predict_cmd.gbt.min_samples_leaf,
                      "Minimum rows per leaf");
  predict->add_option("--seed", predict_cmd.gbt.seed, "Recorded RNG seed");
  predict->add_option("--out", predict_cmd.out, "Report path (default stdout)");
  add_timestamp_flag(predict, predict_cmd.timestamp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) cli::run_synth(synth_cmd);
    if (*traits) cli::run_traits(traits_cmd);
    if (*cluster) cli::run_cluster(cluster_cmd);
    if (*agreement) cli::run_agreement(agreement_cmd);
    if (*tasks) cli::run_tasks(tasks_cmd);
    if (*predict) cli::run_predict(predict_cmd);
  } catch (const traitlab::validation_error& e) {
    return fail("validation", e.what(), 2);
  } catch (const traitlab::numeric_error& e) {
    return fail("numeric", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
