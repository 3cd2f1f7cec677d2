#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "test_util.hpp"
#include "traitlab/stats/anova.hpp"
#include "traitlab/stats/sphericity.hpp"
#include "traitlab/stats/ttest.hpp"

using namespace traitlab;
using namespace traitlab::stats;

namespace {

// Exchangeable conditions: iid noise per cell plus a subject effect gives a
// contrast covariance proportional to the identity in expectation; for an
// exact spherical check, build data whose sample contrast covariance is
// exactly sigma^2 * I by construction.
Eigen::MatrixXd exact_spherical_data(int n, int k, Rng& rng) {
  // start from iid standard normal columns, then whiten the contrast space
  Eigen::MatrixXd x = testutil::random_gaussian(rng, n, k);
  const Eigen::MatrixXd c = detail::helmert_contrasts(k);
  Eigen::MatrixXd y = x * c.transpose(); // n x (k-1) contrast scores
  Eigen::MatrixXd centered = y.rowwise() - y.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  Eigen::MatrixXd white =
      llt.matrixL().solve(centered.transpose()).transpose(); // cov = I
  // map the whitened contrast scores back into condition space
  Eigen::MatrixXd data = white * c;
  return data;
}

} // namespace

TEST_CASE("mauchly_gg is exact on constructed spherical data") {
  Rng rng(83);
  const auto data = exact_spherical_data(12, 4, rng);
  const auto r = mauchly_gg(data);
  CHECK(r.mauchly_w == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(r.gg_epsilon == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(r.p_value > 0.99);
}

TEST_CASE("rank-1 contrast covariance attains the epsilon lower bound") {
  // all conditions are shifted copies of one subject variable => the
  // contrast covariance is rank 1
  Rng rng(89);
  const int n = 10, k = 4;
  Eigen::MatrixXd data(n, k);
  for (int i = 0; i < n; ++i) {
    const double s = rng.uniform(0, 1);
    const double slope = rng.uniform(0.5, 1.5);
    for (int j = 0; j < k; ++j) data(i, j) = s + slope * j;
  }
  const auto r = mauchly_gg(data);
  CHECK(r.singular);
  CHECK(r.mauchly_w == 0.0);
  CHECK(r.gg_epsilon == Catch::Approx(1.0 / (k - 1)).epsilon(1e-9));
}

TEST_CASE("gg epsilon stays within [1/(k-1), 1] and matches brute force") {
  Rng rng(97);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = rng.uniform_int(6, 14);
    const int k = rng.uniform_int(3, 6);
    Eigen::MatrixXd data(n, k);
    for (int i = 0; i < n; ++i) {
      const double subj = rng.normal(0, 1);
      for (int j = 0; j < k; ++j)
        data(i, j) = subj + rng.normal(0, 0.3 + 0.3 * j) + 0.2 * j;
    }
    const auto r = mauchly_gg(data);
    const auto o = oracle::sphericity_bruteforce(data);
    CHECK(r.gg_epsilon >= 1.0 / (k - 1) - 1e-9);
    CHECK(r.gg_epsilon <= 1.0 + 1e-9);
    CHECK(r.gg_epsilon == Catch::Approx(o.epsilon).epsilon(1e-9));
    CHECK(r.mauchly_w == Catch::Approx(o.w).epsilon(1e-8));
  }
}

TEST_CASE("mauchly_gg validation") {
  CHECK_THROWS_AS(mauchly_gg(Eigen::MatrixXd::Random(5, 2)), validation_error);
  CHECK_THROWS_AS(mauchly_gg(Eigen::MatrixXd::Random(1, 4)), validation_error);
}

TEST_CASE("rm_anova null effect: identical conditions per subject") {
  Eigen::MatrixXd data(5, 3);
  for (int i = 0; i < 5; ++i) data.row(i).setConstant(0.2 * i);
  const auto r = rm_anova(data);
  CHECK(r.f == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK(r.degenerate);
}

TEST_CASE("rm_anova matches the hand-decomposed 3x3 table") {
  Eigen::MatrixXd d(3, 3);
  d << 3, 5, 7, 4, 4, 9, 5, 6, 10;
  const auto r = rm_anova(d);
  CHECK(r.ss_subjects == Catch::Approx(6.2222222222222214).epsilon(1e-12));
  CHECK(r.ss_conditions == Catch::Approx(36.222222222222214).epsilon(1e-12));
  CHECK(r.ss_error == Catch::Approx(2.44444444444445).epsilon(1e-10));
  CHECK(r.f == Catch::Approx(29.636363636363562).epsilon(1e-10));
  CHECK(r.p_value == Catch::Approx(0.0039965649359228195).epsilon(1e-9));
}

TEST_CASE("rm_anova with k=2 equals the squared paired t") {
  Rng rng(101);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = rng.uniform_int(4, 12);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    Eigen::MatrixXd data(n, 2);
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = rng.uniform(0, 1);
      y[static_cast<std::size_t>(i)] = rng.uniform(0, 1);
      data(i, 0) = x[static_cast<std::size_t>(i)];
      data(i, 1) = y[static_cast<std::size_t>(i)];
    }
    const auto anova = rm_anova(data);
    const auto t = paired_t(x, y);
    CHECK(anova.f == Catch::Approx(t.t * t.t).epsilon(1e-9));
    CHECK(anova.p_value == Catch::Approx(t.p_value).epsilon(1e-9));
  }
}

TEST_CASE("rm_anova GG correction deflates the degrees of freedom") {
  Rng rng(103);
  const int n = 10, k = 4;
  Eigen::MatrixXd data(n, k);
  for (int i = 0; i < n; ++i) {
    const double subj = rng.normal(0, 1);
    for (int j = 0; j < k; ++j)
      data(i, j) = subj + rng.normal(0, 0.2 + 0.8 * j) + 0.3 * j;
  }
  const auto plain = rm_anova(data, AnovaCorrection::none);
  const auto gg = rm_anova(data, AnovaCorrection::greenhouse_geisser);
  REQUIRE(gg.epsilon_applied.has_value());
  const double eps = *gg.epsilon_applied;
  CHECK(eps > 1.0 / (k - 1) - 1e-12);
  CHECK(eps <= 1.0 + 1e-12);
  CHECK(gg.df1 == Catch::Approx(eps * (k - 1)));
  CHECK(gg.df2 == Catch::Approx(eps * (n - 1) * (k - 1)));
  CHECK(gg.f == Catch::Approx(plain.f)); // statistic unchanged
  CHECK(gg.p_value == Catch::Approx(f_sf(gg.f, gg.df1, gg.df2)).epsilon(1e-12));
}
