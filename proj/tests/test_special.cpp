// Copyright 2026 the iterlap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iterlap/special.hpp"

#include <cmath>

using namespace iterlap;

TEST_CASE("inverse normal CDF round trip is accurate to 1e-12") {
  // u grid spanning deep tails to the center, 10^4 points.
  for (int i = 1; i < 10000; ++i) {
    const double u = 1e-10 + (1.0 - 2e-10) * i / 10000.0;
    const double x = inverse_normal_cdf(u);
    CHECK(std::fabs(normal_cdf(x) - u) < 1e-12);
  }
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  CHECK(inverse_normal_cdf(1e-10) < -6.0);
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::invalid_argument);
}

TEST_CASE("log_sum_exp") {
  Eigen::Vector2d v(std::log(2.0), std::log(3.0));
  CHECK(log_sum_exp(v) == doctest::Approx(std::log(5.0)).epsilon(1e-14));

  Eigen::Vector3d big(1000.0, 1000.0, 1000.0);
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(3.0)).epsilon(1e-14));

  Eigen::Vector2d inf(-std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity());
  CHECK(log_sum_exp(inf) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("student t CDF") {
  CHECK(student_t_cdf(0.0, 5.0) == 0.5);
  // Symmetry.
  for (double x : {0.3, 1.0, 2.5, 7.0})
    CHECK(student_t_cdf(-x, 7.0) == doctest::Approx(1.0 - student_t_cdf(x, 7.0)).epsilon(1e-13));
  // Cauchy special case: T(1; 1) = 3/4.
  CHECK(student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
  // Large df approaches the normal CDF.
  CHECK(student_t_cdf(1.2, 1e7) == doctest::Approx(normal_cdf(1.2)).epsilon(1e-6));
  // log CDF stays finite far in the left tail and matches where both work.
  CHECK(student_t_log_cdf(-3.0, 7.0) ==
        doctest::Approx(std::log(student_t_cdf(-3.0, 7.0))).epsilon(1e-12));
  CHECK(std::isfinite(student_t_log_cdf(-1e6, 7.0)));
  // Cauchy left tail: T(x;1) ~ 1/(pi |x|).
  CHECK(student_t_log_cdf(-1e6, 1.0) ==
        doctest::Approx(std::log(1.0 / (M_PI * 1e6))).epsilon(1e-5));
}

TEST_CASE("regularized incomplete beta against closed forms") {
  // I_x(1, 1) = x.
  for (double x : {0.1, 0.5, 0.9})
    CHECK(reg_inc_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-13));
  // I_x(2, 1) = x^2; I_x(1, 2) = 1 - (1-x)^2.
  CHECK(reg_inc_beta(2.0, 1.0, 0.3) == doctest::Approx(0.09).epsilon(1e-13));
  CHECK(reg_inc_beta(1.0, 2.0, 0.3) == doctest::Approx(1.0 - 0.49).epsilon(1e-13));
  CHECK(reg_inc_beta(2.5, 3.5, 0.0) == 0.0);
  CHECK(reg_inc_beta(2.5, 3.5, 1.0) == 1.0);
}
