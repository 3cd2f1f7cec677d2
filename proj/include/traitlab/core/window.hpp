#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "traitlab/core/traits.hpp"
#include "traitlab/util/errors.hpp"

namespace traitlab::core {

// Sliding-window scheme: trait estimates over `window_s`-second slices at
// `stride_s` steps, averaged into `snapshot_s`-second snapshots.
struct WindowConfig {
  double window_s = 15.0;
  double stride_s = 1.0;
  double snapshot_s = 30.0;

  void validate() const {
    if (!(window_s > 0.0) || !(stride_s > 0.0))
      throw validation_error("WindowConfig: window_s and stride_s must be > 0");
    if (snapshot_s < stride_s)
      throw validation_error("WindowConfig: snapshot_s must be >= stride_s");
    const double ratio = snapshot_s / stride_s;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
      throw validation_error(
          "WindowConfig: snapshot_s must be an integer multiple of stride_s");
  }
};

struct TraitSample {
  double t_start = 0.0;
  TraitVector traits;
};

// Time-indexed snapshot series for one participant. Gaps (non-speaking
// intervals) are simply absent samples.
struct TraitTrajectory {
  std::string participant_id;
  std::vector<TraitSample> samples; // t_start strictly increasing

  void validate() const {
    for (std::size_t i = 1; i < samples.size(); ++i)
      if (!(samples[i].t_start > samples[i - 1].t_start))
        throw validation_error("TraitTrajectory: sample times must be strictly increasing (participant " +
                               participant_id + ")");
    for (const auto& s : samples) s.traits.validate("trajectory sample");
  }

  bool empty() const { return samples.empty(); }
};

// Averages per-stride predictions into snapshots. The snapshot grid is
// anchored at the first prediction timestamp; snapshot i covers
// [t0 + i*snapshot_s, t0 + (i+1)*snapshot_s). A snapshot is emitted when at
// least one prediction falls in its interval, and its value is the mean of
// the predictions present; fully uncovered intervals become gaps.
inline TraitTrajectory snapshot_series(const std::vector<TraitSample>& preds,
                                       const WindowConfig& cfg,
                                       std::string participant_id = {}) {
  cfg.validate();
  TraitTrajectory out;
  out.participant_id = std::move(participant_id);
  if (preds.empty()) return out;

  for (std::size_t i = 1; i < preds.size(); ++i)
    if (!(preds[i].t_start > preds[i - 1].t_start))
      throw validation_error("snapshot_series: prediction times must be strictly increasing");

  const double t0 = preds.front().t_start;
  const long n_bins =
      static_cast<long>(std::floor((preds.back().t_start - t0) / cfg.snapshot_s + 1e-9)) + 1;

  std::vector<TraitVector> sums(static_cast<std::size_t>(n_bins));
  std::vector<long> counts(static_cast<std::size_t>(n_bins), 0);
  for (const auto& p : preds) {
    auto bin = static_cast<std::size_t>(
        std::floor((p.t_start - t0) / cfg.snapshot_s + 1e-9));
    for (int t = 0; t < kTraitCount; ++t) sums[bin][t] += p.traits[t];
    ++counts[bin];
  }

  for (long b = 0; b < n_bins; ++b) {
    const auto bi = static_cast<std::size_t>(b);
    if (counts[bi] == 0) continue;
    TraitSample snap;
    snap.t_start = t0 + static_cast<double>(b) * cfg.snapshot_s;
    for (int t = 0; t < kTraitCount; ++t)
      snap.traits[t] = sums[bi][t] / static_cast<double>(counts[bi]);
    out.samples.push_back(snap);
  }
  return out;
}

} // namespace traitlab::core
