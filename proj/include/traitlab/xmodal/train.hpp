#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "traitlab/core/traits.hpp"
#include "traitlab/util/errors.hpp"
#include "traitlab/util/rng.hpp"
#include "traitlab/xmodal/model.hpp"

namespace traitlab::xmodal {

struct Sample {
  ModalitySequence acoustic;
  ModalitySequence textual;
  ModalitySequence visual;
  core::TraitVector target;
};

namespace detail {

// Reverse pass through one transformer layer. Accumulates weight gradients
// into `gw` and returns gradients with respect to the layer's target input
// and its source stream.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> layer_backward(
    const LayerTrace& t, const TransformerLayerWeights& w, int heads,
    const Eigen::MatrixXd& dout, TransformerLayerWeights& gw) {
  // out = h + a1 w2 + b2
  gw.ffn.w2 += t.a1.transpose() * dout;
  gw.ffn.b2 += dout.colwise().sum().transpose();
  const Eigen::MatrixXd da1 = dout * w.ffn.w2.transpose();
  const Eigen::MatrixXd df1 =
      da1.array() * t.f1.unaryExpr([](double v) { return gelu_derivative(v); }).array();
  gw.ffn.w1 += t.h.transpose() * df1;
  gw.ffn.b1 += df1.colwise().sum().transpose();
  Eigen::MatrixXd dh = dout + df1 * w.ffn.w1.transpose();

  // h = gamma .* rhat + beta
  gw.norm.gamma += (dh.array() * t.rhat.array()).colwise().sum().matrix().transpose();
  gw.norm.beta += dh.colwise().sum().transpose();
  Eigen::MatrixXd drhat =
      dh.array().rowwise() * w.norm.gamma.transpose().array();

  // rhat_i = (r_i - mu_i) * inv_sd_i, row-wise
  Eigen::MatrixXd dr(drhat.rows(), drhat.cols());
  const double d_inv = 1.0 / static_cast<double>(drhat.cols());
  for (Eigen::Index i = 0; i < drhat.rows(); ++i) {
    const double mean_d = drhat.row(i).mean();
    const double mean_dr = (drhat.row(i).array() * t.rhat.row(i).array()).sum() * d_inv;
    dr.row(i) = t.inv_sd(i) *
                (drhat.row(i).array() - mean_d - t.rhat.row(i).array() * mean_dr);
  }

  // r = x + attn
  Eigen::MatrixXd dx = dr;
  const Eigen::MatrixXd& dattn = dr;

  // attn = heads_out wo + bo
  gw.attn.wo += t.att.heads_out.transpose() * dattn;
  gw.attn.bo += dattn.colwise().sum().transpose();
  const Eigen::MatrixXd dheads = dattn * w.attn.wo.transpose();

  const auto d = t.x.cols();
  const auto dh_cols = d / heads;
  Eigen::MatrixXd dq(t.att.q.rows(), d);
  Eigen::MatrixXd dk(t.att.k.rows(), d);
  Eigen::MatrixXd dv(t.att.v.rows(), d);
  for (int head = 0; head < heads; ++head) {
    const auto off = head * dh_cols;
    const auto pq = t.att.phi_q.middleCols(off, dh_cols);
    const auto pk = t.att.phi_k.middleCols(off, dh_cols);
    const auto vh = t.att.v.middleCols(off, dh_cols);
    const auto oh = t.att.heads_out.middleCols(off, dh_cols);
    const auto doh = dheads.middleCols(off, dh_cols);
    const auto& den = t.att.den[static_cast<std::size_t>(head)];
    const auto& s = t.att.s[static_cast<std::size_t>(head)];
    const auto& z = t.att.z[static_cast<std::size_t>(head)];

    // o = (pq s) / den ; den = pq z + eps
    const Eigen::MatrixXd dnum = doh.array().colwise() / den.array();
    const Eigen::VectorXd dden =
        -((doh.array() * oh.array()).rowwise().sum() / den.array()).matrix();

    const Eigen::MatrixXd dpq = dnum * s.transpose() + dden * z.transpose();
    const Eigen::MatrixXd ds = pq.transpose() * dnum;
    const Eigen::VectorXd dz = pq.transpose() * dden;
    Eigen::MatrixXd dpk = vh * ds.transpose();
    dpk.rowwise() += dz.transpose();

    dv.middleCols(off, dh_cols) = pk * ds;
    dq.middleCols(off, dh_cols) =
        dpq.array() *
        attention_feature_map_derivative(t.att.q.middleCols(off, dh_cols)).array();
    dk.middleCols(off, dh_cols) =
        dpk.array() *
        attention_feature_map_derivative(t.att.k.middleCols(off, dh_cols)).array();
  }

  // q = x wq + bq ; k = src wk + bk ; v = src wv + bv
  gw.attn.wq += t.x.transpose() * dq;
  gw.attn.bq += dq.colwise().sum().transpose();
  gw.attn.wk += t.src.transpose() * dk;
  gw.attn.bk += dk.colwise().sum().transpose();
  gw.attn.wv += t.src.transpose() * dv;
  gw.attn.bv += dv.colwise().sum().transpose();

  dx += dq * w.attn.wq.transpose();
  Eigen::MatrixXd dsrc = dk * w.attn.wk.transpose() + dv * w.attn.wv.transpose();
  return {std::move(dx), std::move(dsrc)};
}

// Backward through the whole model for one sample. `dpred` is dL/dpred.
inline void model_backward(const ForwardTrace& t, const ModelParams& params,
                           const std::array<const ModalitySequence*, 3>& seqs,
                           const Eigen::VectorXd& dpred, ModelParams& grads) {
  const int d = params.hyper.model_dim;
  const int heads = params.hyper.heads;

  // pred = sigmoid(logits)
  const Eigen::VectorXd dlogits =
      dpred.array() * t.pred.array() * (1.0 - t.pred.array());
  grads.head_w += t.pooled_all * dlogits.transpose();
  grads.head_b += dlogits;
  const Eigen::VectorXd dpooled_all = params.head_w * dlogits;

  std::array<Eigen::MatrixXd, kModalityCount> dproj;
  for (int m = 0; m < kModalityCount; ++m)
    dproj[static_cast<std::size_t>(m)] =
        Eigen::MatrixXd::Zero(t.proj[static_cast<std::size_t>(m)].rows(), d);

  for (int target = 0; target < kModalityCount; ++target) {
    const auto& tgt = t.target[static_cast<std::size_t>(target)];
    const auto rows = tgt.combined.rows();

    // mean pooling over time
    Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(rows, d);
    dy.rowwise() = dpooled_all.segment(target * d, d).transpose() /
                   static_cast<double>(rows);

    // fusion self-attention layers (src == x: both gradients flow to input)
    const auto& fusion = params.fusion[static_cast<std::size_t>(target)];
    auto& gfusion = grads.fusion[static_cast<std::size_t>(target)];
    for (auto l = static_cast<long>(tgt.fusion.size()) - 1; l >= 0; --l) {
      auto [dx, dsrc] = layer_backward(
          tgt.fusion[static_cast<std::size_t>(l)],
          fusion.layers[static_cast<std::size_t>(l)], heads, dy,
          gfusion.layers[static_cast<std::size_t>(l)]);
      dy = dx + dsrc;
    }

    // combined = concat * combine_w + combine_b
    gfusion.combine_w += tgt.concat.transpose() * dy;
    gfusion.combine_b += dy.colwise().sum().transpose();
    const Eigen::MatrixXd dconcat = dy * fusion.combine_w.transpose();

    int slot = 0;
    for (int source = 0; source < kModalityCount; ++source) {
      if (source == target) continue;
      const int block = cross_block_index(target, source);
      const auto& layers = params.cross[static_cast<std::size_t>(block)];
      auto& glayers = grads.cross[static_cast<std::size_t>(block)];
      const auto& traces = tgt.cross[static_cast<std::size_t>(slot)];

      Eigen::MatrixXd dout = slot == 0 ? dconcat.leftCols(d) : dconcat.rightCols(d);
      for (auto l = static_cast<long>(traces.size()) - 1; l >= 0; --l) {
        auto [dx, dsrc] = layer_backward(traces[static_cast<std::size_t>(l)],
                                         layers[static_cast<std::size_t>(l)], heads,
                                         dout, glayers[static_cast<std::size_t>(l)]);
        dproj[static_cast<std::size_t>(source)] += dsrc;
        dout = std::move(dx);
      }
      dproj[static_cast<std::size_t>(target)] += dout;
      ++slot;
    }
  }

  for (int m = 0; m < kModalityCount; ++m) {
    grads.input_w[static_cast<std::size_t>(m)] +=
        seqs[static_cast<std::size_t>(m)]->features.transpose() *
        dproj[static_cast<std::size_t>(m)];
    grads.input_b[static_cast<std::size_t>(m)] +=
        dproj[static_cast<std::size_t>(m)].colwise().sum().transpose();
  }
}

} // namespace detail

// Mean over samples and traits of the squared error.
inline double batch_loss(const ModelParams& params,
                         const std::vector<Sample>& batch) {
  if (batch.empty()) throw validation_error("batch_loss: empty batch");
  double loss = 0.0;
  for (const auto& s : batch) {
    const auto t = detail::forward_trace(s.acoustic, s.textual, s.visual, params);
    for (int i = 0; i < core::kTraitCount; ++i) {
      const double e = t.pred(i) - s.target[i];
      loss += e * e;
    }
  }
  return loss / (static_cast<double>(batch.size()) * core::kTraitCount);
}

// Loss plus analytic parameter gradients, accumulated over the batch.
inline std::pair<double, ModelParams> batch_gradients(
    const ModelParams& params, const std::vector<Sample>& batch) {
  if (batch.empty()) throw validation_error("batch_gradients: empty batch");
  ModelParams grads = zeros_like(params);
  double loss = 0.0;
  const double scale =
      1.0 / (static_cast<double>(batch.size()) * core::kTraitCount);
  for (const auto& s : batch) {
    const auto t = detail::forward_trace(s.acoustic, s.textual, s.visual, params);
    Eigen::VectorXd dpred(core::kTraitCount);
    for (int i = 0; i < core::kTraitCount; ++i) {
      const double e = t.pred(i) - s.target[i];
      loss += e * e;
      dpred(i) = 2.0 * e * scale;
    }
    const std::array<const ModalitySequence*, 3> seqs = {&s.acoustic, &s.textual,
                                                         &s.visual};
    detail::model_backward(t, params, seqs, dpred, grads);
  }
  // same rounding as batch_loss so recorded losses are bit-comparable
  loss /= static_cast<double>(batch.size()) * core::kTraitCount;
  return {loss, grads};
}

struct TrainResult {
  ModelParams params;
  // loss before each epoch's update, plus the final post-training loss
  std::vector<double> loss_curve;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

// Full-batch Adam on the MSE loss. Deterministic for a fixed seed: the seed
// fixes the initialization and the batch order never changes.
inline TrainResult train(const std::vector<Sample>& dataset,
                         const HyperConfig& hyper) {
  if (dataset.empty()) throw validation_error("train: empty dataset");
  hyper.validate();

  TrainResult result;
  result.params = init_params(hyper);
  Eigen::VectorXd flat = flatten(result.params);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(flat.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(flat.size());

  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    auto [loss, grads] = batch_gradients(result.params, dataset);
    if (!std::isfinite(loss))
      throw numeric_error("train: loss diverged (non-finite) at epoch " +
                          std::to_string(epoch));
    result.loss_curve.push_back(loss);

    const Eigen::VectorXd g = flatten(grads);
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
    v = kAdamBeta2 * v.array().matrix() +
        (1.0 - kAdamBeta2) * g.array().square().matrix();
    const double bc1 = 1.0 - std::pow(kAdamBeta1, epoch);
    const double bc2 = 1.0 - std::pow(kAdamBeta2, epoch);
    flat.array() -= hyper.learning_rate * (m.array() / bc1) /
                    ((v.array() / bc2).sqrt() + kAdamEpsilon);
    unflatten(flat, result.params);
  }
  result.loss_curve.push_back(batch_loss(result.params, dataset));
  if (!std::isfinite(result.loss_curve.back()))
    throw numeric_error("train: final loss non-finite");
  return result;
}

struct GradCheckConfig {
  double step = 1e-5;
  int coordinates = 200; // random parameter subsample size
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::vector<Eigen::Index> coordinate_indices;
  std::vector<double> relative_errors;
};

// Central finite differences against the analytic gradient on a seeded
// random subsample of parameter coordinates.
inline GradCheckResult grad_check(const ModelParams& params,
                                  const std::vector<Sample>& batch,
                                  const GradCheckConfig& cfg = {}) {
  if (batch.empty()) throw validation_error("grad_check: empty batch");
  const auto [loss, grads] = batch_gradients(params, batch);
  (void)loss;
  const Eigen::VectorXd analytic = flatten(grads);
  Eigen::VectorXd flat = flatten(params);
  const Eigen::Index dim = flat.size();

  std::vector<Eigen::Index> coords;
  if (static_cast<Eigen::Index>(cfg.coordinates) >= dim) {
    coords.resize(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) coords[static_cast<std::size_t>(i)] = i;
  } else {
    Rng rng(derive_seed(cfg.seed, 0x6C));
    std::set<Eigen::Index> chosen;
    while (static_cast<int>(chosen.size()) < cfg.coordinates)
      chosen.insert(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(dim))));
    coords.assign(chosen.begin(), chosen.end());
  }

  GradCheckResult result;
  result.coordinate_indices = coords;
  ModelParams probe = params;
  for (const Eigen::Index c : coords) {
    const double saved = flat(c);
    flat(c) = saved + cfg.step;
    unflatten(flat, probe);
    const double lp = batch_loss(probe, batch);
    flat(c) = saved - cfg.step;
    unflatten(flat, probe);
    const double lm = batch_loss(probe, batch);
    flat(c) = saved;

    const double numeric = (lp - lm) / (2.0 * cfg.step);
    const double a = analytic(c);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    const double rel = std::abs(a - numeric) / denom;
    result.relative_errors.push_back(rel);
    result.max_relative_error = std::max(result.max_relative_error, rel);
  }
  unflatten(flat, probe);
  return result;
}

} // namespace traitlab::xmodal
