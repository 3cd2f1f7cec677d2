#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "test_util.hpp"
#include "traitlab/xmodal/attention.hpp"

using namespace traitlab;
using namespace traitlab::xmodal;

TEST_CASE("single key forces weight one on its value") {
  Rng rng(107);
  for (int rep = 0; rep < 20; ++rep) {
    // nonnegative entries keep phi >= 1 so the epsilon guard stays negligible
    const auto q = testutil::random_matrix(rng, 6, 8, 0.0, 1.0);
    const auto k = testutil::random_matrix(rng, 1, 8, 0.0, 1.0);
    const auto v = testutil::random_matrix(rng, 1, 8, -2.0, 2.0);
    const auto out = linear_attention(q, k, v);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        CHECK(out(i, j) == Catch::Approx(v(0, j)).epsilon(1e-5));
  }
}

TEST_CASE("identical keys give the mean of the values") {
  Rng rng(109);
  const auto q = testutil::random_matrix(rng, 5, 8, 0.0, 1.0);
  Eigen::MatrixXd k(4, 8);
  const auto row = testutil::random_matrix(rng, 1, 8, 0.0, 1.0);
  for (int i = 0; i < 4; ++i) k.row(i) = row;
  const auto v = testutil::random_matrix(rng, 4, 8, -1.0, 1.0);
  const Eigen::RowVectorXd mean = v.colwise().mean();
  const auto out = linear_attention(q, k, v);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      CHECK(out(i, j) == Catch::Approx(mean(j)).epsilon(1e-5));
}

TEST_CASE("streaming form matches the quadratic kernel-matrix oracle") {
  Rng rng(113);
  for (int rep = 0; rep < 40; ++rep) {
    const int tq = rng.uniform_int(1, 16);
    const int tk = rng.uniform_int(1, 16);
    const int d = rep % 2 == 0 ? 8 : 32;
    const auto q = testutil::random_gaussian(rng, tq, d);
    const auto k = testutil::random_gaussian(rng, tk, d);
    const auto v = testutil::random_gaussian(rng, tk, d);
    const auto fast = linear_attention(q, k, v);
    const auto slow =
        oracle::linear_attention_quadratic(q, k, v, kAttentionDenomEpsilon);
    const double scale = slow.cwiseAbs().maxCoeff();
    CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, scale));
  }
}

TEST_CASE("5x8 random case against the oracle at tight tolerance") {
  Rng rng(127);
  const auto q = testutil::random_gaussian(rng, 5, 8);
  const auto k = testutil::random_gaussian(rng, 5, 8);
  const auto v = testutil::random_gaussian(rng, 5, 8);
  const auto fast = linear_attention(q, k, v);
  const auto slow =
      oracle::linear_attention_quadratic(q, k, v, kAttentionDenomEpsilon);
  for (Eigen::Index i = 0; i < fast.rows(); ++i)
    for (Eigen::Index j = 0; j < fast.cols(); ++j)
      CHECK(fast(i, j) == Catch::Approx(slow(i, j)).epsilon(1e-10));
}

TEST_CASE("attention output is a convex combination of values") {
  // weights are positive and normalized (up to the epsilon guard), so each
  // output coordinate lies within the value range
  Rng rng(131);
  const auto q = testutil::random_gaussian(rng, 7, 8);
  const auto k = testutil::random_gaussian(rng, 9, 8);
  const auto v = testutil::random_matrix(rng, 9, 8, -3.0, 3.0);
  const auto out = linear_attention(q, k, v);
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double lo = v.col(j).minCoeff();
    const double hi = v.col(j).maxCoeff();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      CHECK(out(i, j) >= std::min(lo, 0.0) - 1e-9);
      CHECK(out(i, j) <= std::max(hi, 0.0) + 1e-9);
    }
  }
}

TEST_CASE("linear_attention validation") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 4);
  Eigen::MatrixXd b = Eigen::MatrixXd::Random(3, 5);
  CHECK_THROWS_AS(linear_attention(a, b, b), validation_error);
  Eigen::MatrixXd v2 = Eigen::MatrixXd::Random(2, 4);
  CHECK_THROWS_AS(linear_attention(a, a, v2), validation_error);
  Eigen::MatrixXd nan_m = a;
  nan_m(0, 0) = std::nan("");
  CHECK_THROWS_AS(linear_attention(nan_m, a, a), validation_error);
}

TEST_CASE("feature map is strictly positive and C1 at the joint") {
  CHECK(attention_phi(0.0) == 1.0);
  CHECK(attention_phi_derivative(0.0) == 1.0);
  CHECK(attention_phi(-40.0) > 0.0);
  CHECK(attention_phi(2.5) == Catch::Approx(3.5));
  // derivative continuity across 0
  CHECK(attention_phi_derivative(-1e-12) == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(attention_phi_derivative(1e-12) == Catch::Approx(1.0).epsilon(1e-9));
}
