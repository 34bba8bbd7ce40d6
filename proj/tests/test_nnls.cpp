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

#include "iterlap/nnls.hpp"
#include "test_util.hpp"

#include <random>

using namespace iterlap;

namespace {

// KKT residual scale per the solution contract: gradient = 2 F'(F w - y),
// |grad_j| <= tol for w_j > 0 and grad_j >= -tol for w_j = 0.
void check_kkt(const Eigen::MatrixXd& F, const Eigen::VectorXd& y, const NnlsSolution& sol,
               double tol_scale = 1e-8) {
  const Eigen::VectorXd grad = 2.0 * F.transpose() * (F * sol.w - y);
  const double tol = tol_scale * std::max(1.0, (F.transpose() * y).lpNorm<Eigen::Infinity>());
  for (Eigen::Index j = 0; j < sol.w.size(); ++j) {
    if (F.col(j).norm() == 0.0) continue;  // pre-dropped columns carry no condition
    if (sol.w[j] > 0.0) {
      CHECK(std::fabs(grad[j]) <= tol);
    } else {
      CHECK(grad[j] >= -tol);
    }
  }
}

}  // namespace

TEST_CASE("identity designs") {
  SUBCASE("negative coordinate is clamped to zero") {
    NnlsProblem prob{Eigen::Matrix2d::Identity(), Eigen::Vector2d(3.0, -2.0)};
    const NnlsSolution sol = solve_nnls(prob);
    CHECK(sol.w[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sol.w[1] == 0.0);
    CHECK(sol.rss == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sol.active == std::vector<int>{1});
  }

  SUBCASE("feasible unconstrained optimum is returned as-is") {
    NnlsProblem prob{Eigen::Matrix3d::Identity(), Eigen::Vector3d(1.0, 2.0, 3.0)};
    const NnlsSolution sol = solve_nnls(prob);
    CHECK((sol.w - prob.y).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(sol.rss < 1e-20);
    CHECK(sol.active.empty());
  }
}

TEST_CASE("near-collinear columns match the brute-force oracle") {
  Eigen::MatrixXd F(2, 2);
  F << 1.0, 1.0, 1.0, 1.0001;
  const Eigen::Vector2d y(1.0, 3.0);
  const NnlsSolution sol = solve_nnls({F, y});
  const testutil::BruteNnls oracle = testutil::brute_force_nnls(F, y);
  CHECK(std::fabs(sol.rss - oracle.rss) < 1e-8);
  CHECK((sol.w - oracle.w).lpNorm<Eigen::Infinity>() < 1e-6);
  check_kkt(F, y, sol);
}

TEST_CASE("200 random problems match exhaustive active-set enumeration") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> dist;
  std::uniform_int_distribution<int> jdist(1, 6), mdist(4, 20);
  for (int rep = 0; rep < 200; ++rep) {
    const int J = jdist(rng);
    const int m = mdist(rng);
    Eigen::MatrixXd F(m, J);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
      y[i] = dist(rng);
      for (int j = 0; j < J; ++j) F(i, j) = dist(rng);
    }
    const NnlsSolution sol = solve_nnls({F, y});
    const testutil::BruteNnls oracle = testutil::brute_force_nnls(F, y);
    CHECK(std::fabs(sol.rss - oracle.rss) < 1e-7 * (1.0 + oracle.rss));
    CHECK((sol.w.array() >= 0.0).all());
    check_kkt(F, y, sol);
    // Recomputed rss agrees with the reported one.
    CHECK(std::fabs((y - F * sol.w).squaredNorm() - sol.rss) < 1e-10 * (1.0 + sol.rss));
  }
}

TEST_CASE("scaling y scales the solution") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd F(8, 3);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) {
    y[i] = dist(rng);
    for (int j = 0; j < 3; ++j) F(i, j) = dist(rng);
  }
  const NnlsSolution base = solve_nnls({F, y});
  const NnlsSolution scaled = solve_nnls({F, 3.5 * y});
  CHECK((scaled.w - 3.5 * base.w).lpNorm<Eigen::Infinity>() < 1e-10 * (1.0 + base.w.norm()));
}

TEST_CASE("solution beats random feasible points") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> dist;
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  Eigen::MatrixXd F(10, 4);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) {
    y[i] = dist(rng);
    for (int j = 0; j < 4; ++j) F(i, j) = dist(rng);
  }
  const NnlsSolution sol = solve_nnls({F, y});
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd w(4);
    for (int j = 0; j < 4; ++j) w[j] = unif(rng);
    CHECK(sol.rss <= (y - F * w).squaredNorm() + 1e-12);
  }
}

TEST_CASE("zero columns are dropped and reported at zero") {
  Eigen::MatrixXd F(4, 3);
  F.setZero();
  F.col(0) << 1.0, 0.5, 0.0, 0.0;
  F.col(2) << 0.0, 0.0, 1.0, 1.0;
  const Eigen::VectorXd y = Eigen::Vector4d(2.0, 1.0, 3.0, 3.0);
  const NnlsSolution sol = solve_nnls({F, y});
  CHECK(sol.w[1] == 0.0);
  CHECK(sol.w[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(sol.w[2] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("invalid inputs are rejected") {
  Eigen::MatrixXd F(2, 2);
  F << 1.0, 0.0, 0.0, 1.0;
  Eigen::VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_nnls({F, bad}), std::invalid_argument);
  CHECK_THROWS_AS(solve_nnls({F, Eigen::VectorXd::Ones(3)}), std::invalid_argument);
}
