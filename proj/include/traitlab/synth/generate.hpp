#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "traitlab/core/session.hpp"
#include "traitlab/core/traits.hpp"
#include "traitlab/util/errors.hpp"
#include "traitlab/util/rng.hpp"

namespace traitlab::synth {

// Controlled generator for null/effect regimes. sigma_between = 0 is the
// null: group membership carries no information about the traits.
struct SynthConfig {
  int n_groups = 17;
  int group_size_min = 3;
  int group_size_max = 4;
  double session_length_s = 600.0;
  double snapshot_s = 30.0;
  double sigma_between = 0.1;  // group-effect std
  double sigma_within = 0.05;  // individual offset std
  double sigma_time = 0.02;    // AR(1) innovation std
  double ar_coefficient = 0.6; // in [0,1)
  double missing_fraction = 0.0;
  int n_tasks = 1; // > 1 adds one session per task label per group
  bool with_performance = false;
  double performance_noise_std = 0.0;
  std::uint64_t seed = 0;

  // latent global mean per trait; snapshots clip to [0,1] around it
  static constexpr double kBaseMean = 0.5;

  void validate() const {
    if (n_groups < 1) throw validation_error("SynthConfig: n_groups must be >= 1");
    if (group_size_min < 2 || group_size_max < group_size_min)
      throw validation_error("SynthConfig: group size range invalid (min >= 2)");
    if (!(snapshot_s > 0.0))
      throw validation_error("SynthConfig: snapshot_s must be > 0");
    if (session_length_s < snapshot_s)
      throw validation_error("SynthConfig: session shorter than one snapshot");
    if (sigma_between < 0.0 || sigma_within < 0.0 || sigma_time < 0.0 ||
        performance_noise_std < 0.0)
      throw validation_error("SynthConfig: standard deviations must be >= 0");
    if (!(ar_coefficient >= 0.0 && ar_coefficient < 1.0))
      throw validation_error("SynthConfig: ar_coefficient must lie in [0,1)");
    if (!(missing_fraction >= 0.0 && missing_fraction < 1.0))
      throw validation_error("SynthConfig: missing_fraction must lie in [0,1)");
    if (n_tasks < 1) throw validation_error("SynthConfig: n_tasks must be >= 1");
  }
};

// Declared performance fixture: 25 * (plasticity + stability) of the latent
// group-mean traits, plus Gaussian noise.
inline double performance_from_traits(const core::TraitVector& group_mean) {
  const auto m = core::meta_traits_unchecked(group_mean);
  return 25.0 * (m.plasticity + m.stability);
}

namespace detail {

inline std::string task_label(int task, int n_tasks) {
  if (n_tasks == 1) return {};
  return std::string(1, static_cast<char>('a' + task));
}

// Marks ~missing_fraction of the snapshots as missing, in contiguous runs of
// random length.
inline std::vector<bool> missing_mask(int n, double fraction, Rng& rng) {
  std::vector<bool> missing(static_cast<std::size_t>(n), false);
  auto quota = static_cast<int>(std::llround(fraction * n));
  quota = std::min(quota, n - 1); // keep at least one snapshot
  int removed = 0;
  const int max_run = std::max(1, n / 6);
  while (removed < quota) {
    const int start = rng.uniform_int(0, n - 1);
    int len = rng.uniform_int(1, max_run);
    for (int i = start; i < n && len > 0 && removed < quota; ++i) {
      if (missing[static_cast<std::size_t>(i)]) continue;
      missing[static_cast<std::size_t>(i)] = true;
      ++removed;
      --len;
    }
  }
  return missing;
}

} // namespace detail

// Group means drawn around a global mean (sigma_between), member offsets
// around the group mean (sigma_within), snapshots as AR(1) noise around the
// member mean (sigma_time, ar_coefficient), clipped to [0,1]. Deterministic
// per seed; every (group, member, task) series draws from its own derived
// stream, so layout changes never ripple across the table.
inline core::SessionTable gen_sessions(const SynthConfig& cfg) {
  cfg.validate();
  const int snapshots =
      static_cast<int>(std::floor(cfg.session_length_s / cfg.snapshot_s));

  core::SessionTable table;
  for (int g = 0; g < cfg.n_groups; ++g) {
    Rng group_rng(derive_seed(cfg.seed, 0x47000000ULL + static_cast<std::uint64_t>(g)));
    const std::string group_id = "g" + std::to_string(g + 1);

    core::TraitVector group_mean;
    for (int t = 0; t < core::kTraitCount; ++t)
      group_mean[t] = SynthConfig::kBaseMean +
                      group_rng.normal(0.0, cfg.sigma_between);

    const int size = cfg.group_size_min == cfg.group_size_max
                         ? cfg.group_size_min
                         : group_rng.uniform_int(cfg.group_size_min, cfg.group_size_max);

    std::vector<core::TraitVector> member_means(static_cast<std::size_t>(size));
    for (int m = 0; m < size; ++m)
      for (int t = 0; t < core::kTraitCount; ++t)
        member_means[static_cast<std::size_t>(m)][t] =
            group_mean[t] + group_rng.normal(0.0, cfg.sigma_within);

    for (int task = 0; task < cfg.n_tasks; ++task) {
      const std::string label = detail::task_label(task, cfg.n_tasks);
      const std::string session_id =
          "s" + std::to_string(g + 1) + (label.empty() ? "" : "_" + label);
      for (int m = 0; m < size; ++m) {
        Rng rng(derive_seed(cfg.seed,
                            0x53000000ULL +
                                static_cast<std::uint64_t>((g * 64 + m) * 16 + task)));
        core::SessionRow row;
        row.group_id = group_id;
        row.session_id = session_id;
        row.task_label = label;
        row.participant_id = group_id + "_p" + std::to_string(m + 1);
        row.trajectory.participant_id = row.participant_id;

        std::vector<double> noise(static_cast<std::size_t>(snapshots) *
                                  core::kTraitCount);
        for (int t = 0; t < core::kTraitCount; ++t) {
          double e = rng.normal(0.0, cfg.sigma_time);
          for (int s = 0; s < snapshots; ++s) {
            noise[static_cast<std::size_t>(s * core::kTraitCount + t)] = e;
            e = cfg.ar_coefficient * e + rng.normal(0.0, cfg.sigma_time);
          }
        }
        const auto missing =
            cfg.missing_fraction > 0.0
                ? detail::missing_mask(snapshots, cfg.missing_fraction, rng)
                : std::vector<bool>(static_cast<std::size_t>(snapshots), false);

        for (int s = 0; s < snapshots; ++s) {
          if (missing[static_cast<std::size_t>(s)]) continue;
          core::TraitSample sample;
          sample.t_start = s * cfg.snapshot_s;
          for (int t = 0; t < core::kTraitCount; ++t) {
            const double v =
                member_means[static_cast<std::size_t>(m)][t] +
                noise[static_cast<std::size_t>(s * core::kTraitCount + t)];
            sample.traits[t] = std::clamp(v, 0.0, 1.0);
          }
          row.trajectory.samples.push_back(sample);
        }
        table.rows.push_back(std::move(row));
      }
    }

    if (cfg.with_performance) {
      core::TraitVector clipped = group_mean;
      for (int t = 0; t < core::kTraitCount; ++t)
        clipped[t] = std::clamp(clipped[t], 0.0, 1.0);
      table.performance[group_id] =
          performance_from_traits(clipped) +
          group_rng.normal(0.0, cfg.performance_noise_std);
    }
  }
  return table;
}

} // namespace traitlab::synth
