#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_util.hpp"
#include "traitlab/xmodal/train.hpp"

using namespace traitlab;
using namespace traitlab::xmodal;

namespace {

HyperConfig tiny_config() {
  HyperConfig h;
  h.model_dim = 8;
  h.heads = 2;
  h.layers = 1;
  h.acoustic_dim = 6;
  h.textual_dim = 7;
  h.visual_dim = 5;
  h.seed = 7;
  h.learning_rate = 0.02;
  h.epochs = 200;
  return h;
}

std::vector<Sample> synthetic_dataset(const HyperConfig& h, int n,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> data;
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.acoustic = {Modality::acoustic,
                  testutil::random_matrix(rng, 4, h.acoustic_dim)};
    s.textual = {Modality::textual,
                 testutil::random_matrix(rng, 5, h.textual_dim)};
    s.visual = {Modality::visual, testutil::random_matrix(rng, 3, h.visual_dim)};
    for (int t = 0; t < core::kTraitCount; ++t)
      s.target[t] = rng.uniform(0.1, 0.9);
    data.push_back(std::move(s));
  }
  return data;
}

} // namespace

TEST_CASE("training overfits an 8-sample synthetic dataset") {
  const auto h = tiny_config();
  const auto data = synthetic_dataset(h, 8, 11);
  const auto result = train(data, h);
  REQUIRE(result.loss_curve.size() == static_cast<std::size_t>(h.epochs) + 1);
  CHECK(result.loss_curve.back() < 0.01);
  // loss should broadly decrease
  CHECK(result.loss_curve.back() < result.loss_curve.front());
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  auto h = tiny_config();
  h.learning_rate = 0.0;
  h.epochs = 5;
  const auto data = synthetic_dataset(h, 3, 13);
  const auto result = train(data, h);
  CHECK(flatten(result.params) == flatten(init_params(h)));
  for (std::size_t i = 1; i < result.loss_curve.size(); ++i)
    CHECK(result.loss_curve[i] == result.loss_curve[0]);
}

TEST_CASE("same seed gives bit-identical loss curves") {
  auto h = tiny_config();
  h.epochs = 20;
  const auto data = synthetic_dataset(h, 4, 17);
  const auto a = train(data, h);
  const auto b = train(data, h);
  CHECK(a.loss_curve == b.loss_curve);
  CHECK(flatten(a.params) == flatten(b.params));
}

TEST_CASE("gradient check on the toy model") {
  const auto h = tiny_config();
  const auto data = synthetic_dataset(h, 2, 19);
  const auto params = init_params(h);
  GradCheckConfig cfg;
  cfg.coordinates = 200;
  cfg.seed = 5;
  const auto r = grad_check(params, data, cfg);
  REQUIRE(r.relative_errors.size() == 200);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("gradient check is deterministic for a fixed seed") {
  const auto h = tiny_config();
  const auto data = synthetic_dataset(h, 2, 23);
  const auto params = init_params(h);
  GradCheckConfig cfg;
  cfg.coordinates = 50;
  cfg.seed = 9;
  const auto a = grad_check(params, data, cfg);
  const auto b = grad_check(params, data, cfg);
  CHECK(a.coordinate_indices == b.coordinate_indices);
  CHECK(a.relative_errors == b.relative_errors);
  CHECK(a.max_relative_error == b.max_relative_error);
}

TEST_CASE("zero loss gives zero gradients") {
  const auto h = tiny_config();
  auto data = synthetic_dataset(h, 2, 29);
  const auto params = init_params(h);
  // set targets to the model's own outputs: loss is exactly zero
  for (auto& s : data) {
    const auto out = forward(s.acoustic, s.textual, s.visual, params);
    for (int t = 0; t < core::kTraitCount; ++t) s.target[t] = out[t];
  }
  const auto [loss, grads] = batch_gradients(params, data);
  CHECK(loss == 0.0);
  const auto flat = flatten(grads);
  CHECK(flat.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training rejects an empty dataset") {
  CHECK_THROWS_AS(train({}, tiny_config()), validation_error);
}

TEST_CASE("window pipeline end-to-end determinism") {
  // per-window forward is pure: same inputs and params give identical bits
  const auto h = tiny_config();
  const auto params = init_params(h);
  const auto data = synthetic_dataset(h, 1, 31);
  const auto a = forward(data[0].acoustic, data[0].textual, data[0].visual, params);
  const auto b = forward(data[0].acoustic, data[0].textual, data[0].visual, params);
  for (int t = 0; t < core::kTraitCount; ++t) CHECK(a[t] == b[t]);
}
