#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "traitlab/core/traits.hpp"
#include "traitlab/util/errors.hpp"
#include "traitlab/util/rng.hpp"
#include "traitlab/xmodal/attention.hpp"
#include "traitlab/xmodal/sequence.hpp"

namespace traitlab::xmodal {

inline constexpr int kModalityCount = 3;
inline constexpr int kCrossModalBlockCount = 6; // 3 targets x 2 sources
inline constexpr int kFfnMultiplier = 2;        // hidden width of the FFN
inline constexpr double kLayerNormEpsilon = 1e-5;

struct HyperConfig {
  int model_dim = 32;
  int heads = 4;
  int layers = 1; // transformer layers per block
  double learning_rate = 1e-2;
  int epochs = 100;
  std::uint64_t seed = 0;
  // input feature dimensions (eGeMAPS / BERT / facial action units)
  int acoustic_dim = 88;
  int textual_dim = 768;
  int visual_dim = 17;

  int input_dim(int modality) const {
    return modality == 0 ? acoustic_dim : (modality == 1 ? textual_dim : visual_dim);
  }

  void validate() const {
    if (model_dim < 1 || heads < 1 || layers < 1)
      throw validation_error("HyperConfig: model_dim, heads and layers must be >= 1");
    if (model_dim % heads != 0)
      throw validation_error("HyperConfig: model_dim must be divisible by heads");
    if (acoustic_dim < 1 || textual_dim < 1 || visual_dim < 1)
      throw validation_error("HyperConfig: input dimensions must be >= 1");
    if (epochs < 0) throw validation_error("HyperConfig: epochs must be >= 0");
  }
};

struct AttentionWeights {
  Eigen::MatrixXd wq, wk, wv, wo; // each (d, d)
  Eigen::VectorXd bq, bk, bv, bo; // each (d)
};

struct LayerNormWeights {
  Eigen::VectorXd gamma, beta; // each (d)
};

struct FeedForwardWeights {
  Eigen::MatrixXd w1; // (d, h)
  Eigen::VectorXd b1; // (h)
  Eigen::MatrixXd w2; // (h, d)
  Eigen::VectorXd b2; // (d)
};

// One post-norm transformer layer: multi-head linear attention, residual,
// layer norm, then a position-wise feed-forward with residual.
struct TransformerLayerWeights {
  AttentionWeights attn;
  LayerNormWeights norm;
  FeedForwardWeights ffn;
};

// Fusion unit for one target modality: featurewise combination of the two
// cross-modal streams (2d -> d) followed by self-attention layers.
struct FusionWeights {
  Eigen::MatrixXd combine_w; // (2d, d)
  Eigen::VectorXd combine_b; // (d)
  std::vector<TransformerLayerWeights> layers;
};

// Index of the cross-modal block translating `source` into `target`.
inline int cross_block_index(int target, int source) {
  return target * 2 + (source < target ? source : source - 1);
}

inline std::pair<int, int> cross_block_pair(int index) { // (target, source)
  const int target = index / 2;
  int source = index % 2;
  if (source >= target) ++source;
  return {target, source};
}

struct ModelParams {
  HyperConfig hyper;
  std::array<Eigen::MatrixXd, kModalityCount> input_w; // (d_m, d)
  std::array<Eigen::VectorXd, kModalityCount> input_b; // (d)
  std::array<std::vector<TransformerLayerWeights>, kCrossModalBlockCount> cross;
  std::array<FusionWeights, kModalityCount> fusion;
  Eigen::MatrixXd head_w; // (3d, 5)
  Eigen::VectorXd head_b; // (5)
};

namespace detail {

template <typename Layer, typename F>
void visit_layer(Layer& layer, const std::string& prefix, F&& f) {
  f(prefix + ".attn.wq", layer.attn.wq);
  f(prefix + ".attn.bq", layer.attn.bq);
  f(prefix + ".attn.wk", layer.attn.wk);
  f(prefix + ".attn.bk", layer.attn.bk);
  f(prefix + ".attn.wv", layer.attn.wv);
  f(prefix + ".attn.bv", layer.attn.bv);
  f(prefix + ".attn.wo", layer.attn.wo);
  f(prefix + ".attn.bo", layer.attn.bo);
  f(prefix + ".norm.gamma", layer.norm.gamma);
  f(prefix + ".norm.beta", layer.norm.beta);
  f(prefix + ".ffn.w1", layer.ffn.w1);
  f(prefix + ".ffn.b1", layer.ffn.b1);
  f(prefix + ".ffn.w2", layer.ffn.w2);
  f(prefix + ".ffn.b2", layer.ffn.b2);
}

} // namespace detail

// Visits every tensor in a fixed canonical order; the single source of truth
// for flattening, the parameter census and serialization.
template <typename Params, typename F>
void visit_params(Params& p, F&& f) {
  static const char* kModNames[kModalityCount] = {"acoustic", "textual", "visual"};
  for (int m = 0; m < kModalityCount; ++m) {
    f(std::string("input.") + kModNames[m] + ".w", p.input_w[static_cast<std::size_t>(m)]);
    f(std::string("input.") + kModNames[m] + ".b", p.input_b[static_cast<std::size_t>(m)]);
  }
  for (int b = 0; b < kCrossModalBlockCount; ++b) {
    const auto [target, source] = cross_block_pair(b);
    const std::string prefix = std::string("cross.") + kModNames[target] +
                               "_from_" + kModNames[source];
    auto& layers = p.cross[static_cast<std::size_t>(b)];
    for (std::size_t l = 0; l < layers.size(); ++l)
      detail::visit_layer(layers[l], prefix + ".layer" + std::to_string(l), f);
  }
  for (int m = 0; m < kModalityCount; ++m) {
    const std::string prefix = std::string("fusion.") + kModNames[m];
    f(prefix + ".combine.w", p.fusion[static_cast<std::size_t>(m)].combine_w);
    f(prefix + ".combine.b", p.fusion[static_cast<std::size_t>(m)].combine_b);
    auto& layers = p.fusion[static_cast<std::size_t>(m)].layers;
    for (std::size_t l = 0; l < layers.size(); ++l)
      detail::visit_layer(layers[l], prefix + ".layer" + std::to_string(l), f);
  }
  f(std::string("head.w"), p.head_w);
  f(std::string("head.b"), p.head_b);
}

struct TensorInfo {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

inline std::vector<TensorInfo> parameter_census(const ModelParams& p) {
  std::vector<TensorInfo> out;
  visit_params(p, [&out](const std::string& name, const auto& tensor) {
    if constexpr (std::is_same_v<std::decay_t<decltype(tensor)>, Eigen::VectorXd>)
      out.push_back({name, tensor.size(), 1});
    else
      out.push_back({name, tensor.rows(), tensor.cols()});
  });
  return out;
}

inline Eigen::Index parameter_count(const ModelParams& p) {
  Eigen::Index n = 0;
  visit_params(p, [&n](const std::string&, const auto& t) { n += t.size(); });
  return n;
}

inline Eigen::VectorXd flatten(const ModelParams& p) {
  Eigen::VectorXd flat(parameter_count(p));
  Eigen::Index at = 0;
  visit_params(p, [&](const std::string&, const auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) flat(at++) = t.data()[i];
  });
  return flat;
}

inline void unflatten(const Eigen::VectorXd& flat, ModelParams& p) {
  if (flat.size() != parameter_count(p))
    throw validation_error("unflatten: size mismatch");
  Eigen::Index at = 0;
  visit_params(p, [&](const std::string&, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = flat(at++);
  });
}

namespace detail {

inline void glorot_init(Eigen::MatrixXd& w, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      w(i, j) = rng.uniform(-limit, limit);
}

inline TransformerLayerWeights make_layer(int d, Rng& rng) {
  TransformerLayerWeights layer;
  const int h = kFfnMultiplier * d;
  layer.attn.wq.resize(d, d);
  layer.attn.wk.resize(d, d);
  layer.attn.wv.resize(d, d);
  layer.attn.wo.resize(d, d);
  glorot_init(layer.attn.wq, rng);
  glorot_init(layer.attn.wk, rng);
  glorot_init(layer.attn.wv, rng);
  glorot_init(layer.attn.wo, rng);
  layer.attn.bq = Eigen::VectorXd::Zero(d);
  layer.attn.bk = Eigen::VectorXd::Zero(d);
  layer.attn.bv = Eigen::VectorXd::Zero(d);
  layer.attn.bo = Eigen::VectorXd::Zero(d);
  layer.norm.gamma = Eigen::VectorXd::Ones(d);
  layer.norm.beta = Eigen::VectorXd::Zero(d);
  layer.ffn.w1.resize(d, h);
  layer.ffn.w2.resize(h, d);
  glorot_init(layer.ffn.w1, rng);
  glorot_init(layer.ffn.w2, rng);
  layer.ffn.b1 = Eigen::VectorXd::Zero(h);
  layer.ffn.b2 = Eigen::VectorXd::Zero(d);
  return layer;
}

} // namespace detail

// Seeded Glorot-uniform initialization; biases start at zero, layer norms at
// identity. The visit order fixes the init order, so a given seed always
// produces bit-identical parameters.
inline ModelParams init_params(const HyperConfig& hyper) {
  hyper.validate();
  const int d = hyper.model_dim;
  Rng rng(derive_seed(hyper.seed, 0xA11C));

  ModelParams p;
  p.hyper = hyper;
  for (int m = 0; m < kModalityCount; ++m) {
    auto& w = p.input_w[static_cast<std::size_t>(m)];
    w.resize(hyper.input_dim(m), d);
    detail::glorot_init(w, rng);
    p.input_b[static_cast<std::size_t>(m)] = Eigen::VectorXd::Zero(d);
  }
  for (int b = 0; b < kCrossModalBlockCount; ++b)
    for (int l = 0; l < hyper.layers; ++l)
      p.cross[static_cast<std::size_t>(b)].push_back(detail::make_layer(d, rng));
  for (int m = 0; m < kModalityCount; ++m) {
    auto& fusion = p.fusion[static_cast<std::size_t>(m)];
    fusion.combine_w.resize(2 * d, d);
    detail::glorot_init(fusion.combine_w, rng);
    fusion.combine_b = Eigen::VectorXd::Zero(d);
    for (int l = 0; l < hyper.layers; ++l)
      fusion.layers.push_back(detail::make_layer(d, rng));
  }
  p.head_w.resize(3 * d, core::kTraitCount);
  detail::glorot_init(p.head_w, rng);
  p.head_b = Eigen::VectorXd::Zero(core::kTraitCount);
  return p;
}

inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  visit_params(z, [](const std::string&, auto& t) { t.setZero(); });
  return z;
}

// ---------------------------------------------------------------------------
// Forward pass with cached intermediates (consumed by the backward pass).

namespace detail {

inline double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
}

inline double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

struct AttentionTrace {
  Eigen::MatrixXd q, k, v;          // post-projection (T, d)
  Eigen::MatrixXd phi_q, phi_k;     // feature-mapped
  std::vector<Eigen::MatrixXd> s;   // per head (dh, dh)
  std::vector<Eigen::VectorXd> z;   // per head (dh)
  std::vector<Eigen::VectorXd> den; // per head (Tq)
  Eigen::MatrixXd heads_out;        // (Tq, d), pre output projection
  Eigen::MatrixXd attn;             // heads_out * wo + bo
};

struct LayerTrace {
  Eigen::MatrixXd x;   // layer input (target stream)
  Eigen::MatrixXd src; // source stream
  AttentionTrace att;
  Eigen::MatrixXd r;      // x + attn
  Eigen::MatrixXd rhat;   // row-normalized r
  Eigen::VectorXd inv_sd; // per-row 1/sqrt(var + eps)
  Eigen::MatrixXd h;      // gamma .* rhat + beta
  Eigen::MatrixXd f1;     // h w1 + b1
  Eigen::MatrixXd a1;     // gelu(f1)
  Eigen::MatrixXd out;    // h + a1 w2 + b2
};

inline void check_finite(const Eigen::MatrixXd& m, const std::string& layer) {
  if (!m.allFinite())
    throw numeric_error("non-finite activation in " + layer);
}

inline AttentionTrace attention_forward(const Eigen::MatrixXd& x,
                                        const Eigen::MatrixXd& src,
                                        const AttentionWeights& w, int heads) {
  AttentionTrace t;
  t.q = (x * w.wq).rowwise() + w.bq.transpose();
  t.k = (src * w.wk).rowwise() + w.bk.transpose();
  t.v = (src * w.wv).rowwise() + w.bv.transpose();
  t.phi_q = attention_feature_map(t.q);
  t.phi_k = attention_feature_map(t.k);

  const auto d = x.cols();
  const auto dh = d / heads;
  t.heads_out.resize(x.rows(), d);
  t.s.reserve(static_cast<std::size_t>(heads));
  t.z.reserve(static_cast<std::size_t>(heads));
  t.den.reserve(static_cast<std::size_t>(heads));
  for (int hIdx = 0; hIdx < heads; ++hIdx) {
    const auto off = hIdx * dh;
    const auto pq = t.phi_q.middleCols(off, dh);
    const auto pk = t.phi_k.middleCols(off, dh);
    const auto vh = t.v.middleCols(off, dh);
    Eigen::MatrixXd s = pk.transpose() * vh;                   // (dh, dh)
    Eigen::VectorXd z = pk.colwise().sum().transpose();        // (dh)
    Eigen::VectorXd den = (pq * z).array() + kAttentionDenomEpsilon;
    t.heads_out.middleCols(off, dh) =
        (pq * s).array().colwise() / den.array();
    t.s.push_back(std::move(s));
    t.z.push_back(std::move(z));
    t.den.push_back(std::move(den));
  }
  t.attn = (t.heads_out * w.wo).rowwise() + w.bo.transpose();
  return t;
}

inline LayerTrace layer_forward(const Eigen::MatrixXd& x,
                                const Eigen::MatrixXd& src,
                                const TransformerLayerWeights& w, int heads,
                                const std::string& name) {
  LayerTrace t;
  t.x = x;
  t.src = src;
  t.att = attention_forward(x, src, w.attn, heads);
  check_finite(t.att.attn, name + " attention");

  t.r = x + t.att.attn;
  const auto rows = t.r.rows();
  const auto d = t.r.cols();
  t.rhat.resize(rows, d);
  t.inv_sd.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double mu = t.r.row(i).mean();
    const double var = (t.r.row(i).array() - mu).square().mean();
    const double inv = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    t.inv_sd(i) = inv;
    t.rhat.row(i) = (t.r.row(i).array() - mu) * inv;
  }
  t.h = (t.rhat.array().rowwise() * w.norm.gamma.transpose().array())
            .rowwise() +
        w.norm.beta.transpose().array();
  check_finite(t.h, name + " layer norm");

  t.f1 = (t.h * w.ffn.w1).rowwise() + w.ffn.b1.transpose();
  t.a1 = t.f1.unaryExpr([](double v) { return gelu(v); });
  t.out = t.h + ((t.a1 * w.ffn.w2).rowwise() + w.ffn.b2.transpose());
  check_finite(t.out, name + " feed-forward");
  return t;
}

struct TargetTrace {
  std::array<std::vector<LayerTrace>, 2> cross; // per source, per layer
  Eigen::MatrixXd concat;                       // (T, 2d)
  Eigen::MatrixXd combined;                     // (T, d)
  std::vector<LayerTrace> fusion;
  Eigen::RowVectorXd pooled;                    // (d)
};

struct ForwardTrace {
  std::array<Eigen::MatrixXd, kModalityCount> proj; // input projections
  std::array<TargetTrace, kModalityCount> target;
  Eigen::VectorXd pooled_all; // (3d)
  Eigen::VectorXd logits;     // (5)
  Eigen::VectorXd pred;       // sigmoid(logits)
};

inline ForwardTrace forward_trace(const ModalitySequence& acoustic,
                                  const ModalitySequence& textual,
                                  const ModalitySequence& visual,
                                  const ModelParams& params) {
  params.hyper.validate();
  const std::array<const ModalitySequence*, kModalityCount> seqs = {
      &acoustic, &textual, &visual};
  for (int m = 0; m < kModalityCount; ++m) {
    seqs[static_cast<std::size_t>(m)]->validate();
    if (seqs[static_cast<std::size_t>(m)]->tag != static_cast<Modality>(m))
      throw validation_error("forward: sequence passed in the wrong modality slot");
    if (seqs[static_cast<std::size_t>(m)]->features.cols() != params.hyper.input_dim(m))
      throw validation_error(
          std::string("forward: ") + modality_name(static_cast<Modality>(m)) +
          " feature dimension does not match the model");
  }

  const int heads = params.hyper.heads;
  const int d = params.hyper.model_dim;
  ForwardTrace t;
  for (int m = 0; m < kModalityCount; ++m) {
    t.proj[static_cast<std::size_t>(m)] =
        (seqs[static_cast<std::size_t>(m)]->features * params.input_w[static_cast<std::size_t>(m)])
            .rowwise() +
        params.input_b[static_cast<std::size_t>(m)].transpose();
    check_finite(t.proj[static_cast<std::size_t>(m)],
                 std::string("input projection ") + modality_name(static_cast<Modality>(m)));
  }

  t.pooled_all.resize(kModalityCount * d);
  for (int target = 0; target < kModalityCount; ++target) {
    auto& tgt = t.target[static_cast<std::size_t>(target)];
    int slot = 0;
    for (int source = 0; source < kModalityCount; ++source) {
      if (source == target) continue;
      const int block = cross_block_index(target, source);
      const auto& layers = params.cross[static_cast<std::size_t>(block)];
      const std::string name = std::string("cross.") +
                               modality_name(static_cast<Modality>(target)) + "_from_" +
                               modality_name(static_cast<Modality>(source));
      Eigen::MatrixXd x = t.proj[static_cast<std::size_t>(target)];
      auto& trace_list = tgt.cross[static_cast<std::size_t>(slot)];
      for (std::size_t l = 0; l < layers.size(); ++l) {
        trace_list.push_back(layer_forward(
            x, t.proj[static_cast<std::size_t>(source)], layers[l], heads,
            name + ".layer" + std::to_string(l)));
        x = trace_list.back().out;
      }
      ++slot;
    }

    const auto rows = t.proj[static_cast<std::size_t>(target)].rows();
    tgt.concat.resize(rows, 2 * d);
    tgt.concat.leftCols(d) = tgt.cross[0].back().out;
    tgt.concat.rightCols(d) = tgt.cross[1].back().out;

    const auto& fusion = params.fusion[static_cast<std::size_t>(target)];
    tgt.combined = (tgt.concat * fusion.combine_w).rowwise() +
                   fusion.combine_b.transpose();
    const std::string name = std::string("fusion.") +
                             modality_name(static_cast<Modality>(target));
    check_finite(tgt.combined, name + " combine");

    Eigen::MatrixXd y = tgt.combined;
    for (std::size_t l = 0; l < fusion.layers.size(); ++l) {
      tgt.fusion.push_back(layer_forward(y, y, fusion.layers[l], heads,
                                         name + ".layer" + std::to_string(l)));
      y = tgt.fusion.back().out;
    }
    tgt.pooled = y.colwise().mean();
    t.pooled_all.segment(target * d, d) = tgt.pooled.transpose();
  }

  t.logits = params.head_w.transpose() * t.pooled_all + params.head_b;
  check_finite(t.logits, "head");
  t.pred = t.logits.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  return t;
}

} // namespace detail

// One cross-modal block applied to already-projected sequences: queries from
// `target`, keys/values from `source`, output length = target length.
inline Eigen::MatrixXd cross_modal_block(
    const Eigen::MatrixXd& target, const Eigen::MatrixXd& source,
    const std::vector<TransformerLayerWeights>& layers, int heads) {
  if (target.cols() != source.cols())
    throw validation_error("cross_modal_block: target/source dimension mismatch");
  if (layers.empty())
    throw validation_error("cross_modal_block: no layers");
  if (target.cols() % heads != 0)
    throw validation_error("cross_modal_block: dimension not divisible by heads");
  Eigen::MatrixXd x = target;
  for (std::size_t l = 0; l < layers.size(); ++l)
    x = detail::layer_forward(x, source, layers[l], heads,
                              "cross_modal_block.layer" + std::to_string(l))
            .out;
  return x;
}

// Full multimodal pass: six cross-modal blocks, per-target self-attention
// fusion, temporal mean pooling, linear head with logistic squashing into
// (0,1)^5.
inline core::TraitVector forward(const ModalitySequence& acoustic,
                                 const ModalitySequence& textual,
                                 const ModalitySequence& visual,
                                 const ModelParams& params) {
  const auto trace = detail::forward_trace(acoustic, textual, visual, params);
  core::TraitVector out;
  for (int i = 0; i < core::kTraitCount; ++i) out[i] = trace.pred(i);
  return out;
}

} // namespace traitlab::xmodal
