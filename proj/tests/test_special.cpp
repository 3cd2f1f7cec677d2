#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "traitlab/stats/special.hpp"

using namespace traitlab::stats;

// Reference values computed independently with scipy.stats (double precision).

TEST_CASE("student t CDF matches reference values") {
  CHECK(student_t_cdf(1.3, 4.0) ==
        Catch::Approx(0.86827420176438797).epsilon(1e-12));
  CHECK(student_t_cdf(-2.7, 11.5) ==
        Catch::Approx(0.0099749522460788123).epsilon(1e-12));
  CHECK(student_t_cdf(0.0, 7.0) == 0.5);
  CHECK(student_t_cdf(std::numeric_limits<double>::infinity(), 3.0) == 1.0);
  CHECK(student_t_cdf(-std::numeric_limits<double>::infinity(), 3.0) == 0.0);
}

TEST_CASE("t CDF symmetry") {
  for (double t : {0.1, 0.7, 1.9, 3.3}) {
    for (double df : {2.0, 5.5, 30.0}) {
      CHECK(student_t_cdf(t, df) + student_t_cdf(-t, df) ==
            Catch::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("F CDF matches reference values, non-integer df included") {
  CHECK(f_cdf(3.4, 2.7, 11.3) ==
        Catch::Approx(0.94050895296590764).epsilon(1e-12));
  CHECK(f_cdf(0.3, 1.0, 8.0) ==
        Catch::Approx(0.40117286330271101).epsilon(1e-12));
  CHECK(f_cdf(0.0, 3.0, 3.0) == 0.0);
  CHECK(f_cdf(std::numeric_limits<double>::infinity(), 3.0, 3.0) == 1.0);
  CHECK(f_sf(3.4, 2.7, 11.3) ==
        Catch::Approx(1.0 - 0.94050895296590764).epsilon(1e-10));
}

TEST_CASE("chi-squared CDF matches reference values") {
  CHECK(chi_squared_cdf(5.2, 4.0) ==
        Catch::Approx(0.7326151184283981).epsilon(1e-12));
  CHECK(chi_squared_cdf(13.7, 2.5) ==
        Catch::Approx(0.9980461597310688).epsilon(1e-12));
  CHECK(chi_squared_sf(5.2, 4.0) ==
        Catch::Approx(1.0 - 0.7326151184283981).epsilon(1e-10));
}

TEST_CASE("F of squared t equals two-sided t relationship") {
  // P(F_{1,v} <= t^2) = 1 - two-sided t p-value
  for (double t : {0.4, 1.1, 2.6}) {
    for (double v : {3.0, 9.0, 24.0}) {
      const double p_two = student_t_two_sided_p(t, v);
      CHECK(f_sf(t * t, 1.0, v) == Catch::Approx(p_two).epsilon(1e-11));
    }
  }
}

TEST_CASE("degrees of freedom validated") {
  CHECK_THROWS_AS(student_t_cdf(1.0, 0.0), traitlab::validation_error);
  CHECK_THROWS_AS(f_cdf(1.0, -1.0, 2.0), traitlab::validation_error);
  CHECK_THROWS_AS(chi_squared_cdf(1.0, 0.0), traitlab::validation_error);
}
