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

#include "iterlap/montecarlo.hpp"
#include "iterlap/special.hpp"

#include <cmath>

using namespace iterlap;

namespace {

Mixture standard_normal_mixture(int p = 2) {
  GaussComponent c(Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Identity(p, p));
  return Mixture(Eigen::VectorXd::Ones(1), {c});
}

TargetDensity normal_target(int p = 2) {
  return TargetDensity(
      p,
      [p](const Eigen::VectorXd& x) {
        return -0.5 * x.squaredNorm() - 0.5 * p * std::log(2.0 * M_PI);
      },
      "normal");
}

ImportanceSample weights_only(const Eigen::VectorXd& w_norm) {
  ImportanceSample s;
  s.draws = Eigen::MatrixXd::Zero(w_norm.size(), 1);
  s.log_w = w_norm.array().max(1e-300).log();
  s.w_norm = w_norm;
  return s;
}

}  // namespace

TEST_CASE("proposal equal to the target gives uniform weights and NESS 1") {
  TargetDensity t = normal_target();
  Mixture q = standard_normal_mixture();
  RandomStream rng(1);
  const ImportanceSample s = importance_sample(t, q, 5000, rng);
  CHECK((s.log_w.array() - s.log_w[0]).abs().maxCoeff() < 1e-12);
  CHECK(ness(s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.w_norm.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(estimate_Z(s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant rescaling of the target is recovered exactly in Z") {
  Mixture q = standard_normal_mixture();
  TargetDensity t(
      2,
      [](const Eigen::VectorXd& x) {
        return std::log(7.25) - 0.5 * x.squaredNorm() - std::log(2.0 * M_PI);
      },
      "scaled_normal");
  RandomStream rng(2);
  const ImportanceSample s = importance_sample(t, q, 2000, rng);
  CHECK(estimate_Z(s) == doctest::Approx(7.25).epsilon(1e-10));
  CHECK(log_estimate_Z(s) == doctest::Approx(std::log(7.25)).epsilon(1e-12));
}

TEST_CASE("ness closed forms") {
  CHECK(ness(weights_only(Eigen::VectorXd::Constant(10, 0.1))) ==
        doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd degenerate = Eigen::VectorXd::Zero(100);
  degenerate[3] = 1.0;
  CHECK(ness(weights_only(degenerate)) == doctest::Approx(0.01).epsilon(1e-12));

  Eigen::VectorXd w(3);
  w << 0.25, 0.25, 0.5;  // proportional to (1, 1, 2)
  CHECK(ness(weights_only(w)) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));

  CHECK_THROWS_AS(ness(weights_only(Eigen::VectorXd::Zero(5))), std::runtime_error);
}

TEST_CASE("ness is 1 exactly when weights are equal") {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(8, 0.125);
  CHECK(ness(weights_only(w)) == doctest::Approx(1.0).epsilon(1e-13));
  w[0] += 0.01;
  w[1] -= 0.01;
  CHECK(ness(weights_only(w)) < 1.0);
}

TEST_CASE("moments") {
  SUBCASE("uniform weights on symmetric points") {
    ImportanceSample s;
    s.draws.resize(2, 1);
    s.draws << -1.0, 1.0;
    s.w_norm = Eigen::Vector2d(0.5, 0.5);
    s.log_w = Eigen::Vector2d::Zero();
    const auto [mean, sd] = moments(s);
    CHECK(mean[0] == 0.0);
    CHECK(sd[0] == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("single point has zero spread") {
    ImportanceSample s;
    s.draws.resize(1, 2);
    s.draws << 3.0, -4.0;
    s.w_norm = Eigen::VectorXd::Ones(1);
    s.log_w = Eigen::VectorXd::Zero(1);
    const auto [mean, sd] = moments(s);
    CHECK(mean[0] == 3.0);
    CHECK(sd.norm() == 0.0);
  }
}

TEST_CASE("residual resampling exact counts") {
  RandomStream rng(3);

  SUBCASE("no residual part") {
    ImportanceSample s;
    s.draws.resize(2, 1);
    s.draws << 1.0, 2.0;
    s.w_norm = Eigen::Vector2d(0.5, 0.5);
    const Eigen::MatrixXd out = residual_resample(s, 4, rng);
    CHECK((out.col(0).array() == 1.0).count() == 2);
    CHECK((out.col(0).array() == 2.0).count() == 2);
  }

  SUBCASE("3-1 split") {
    ImportanceSample s;
    s.draws.resize(2, 1);
    s.draws << 1.0, 2.0;
    s.w_norm = Eigen::Vector2d(0.75, 0.25);
    const Eigen::MatrixXd out = residual_resample(s, 4, rng);
    CHECK((out.col(0).array() == 1.0).count() == 3);
    CHECK((out.col(0).array() == 2.0).count() == 1);
  }

  SUBCASE("3-2 split") {
    ImportanceSample s;
    s.draws.resize(2, 1);
    s.draws << 1.0, 2.0;
    s.w_norm = Eigen::Vector2d(0.6, 0.4);
    const Eigen::MatrixXd out = residual_resample(s, 5, rng);
    CHECK((out.col(0).array() == 1.0).count() == 3);
    CHECK((out.col(0).array() == 2.0).count() == 2);
  }
}

TEST_CASE("residual resampling preserves expectations") {
  // Five atoms with uneven weights; h(x) = x. The mean of the resampled
  // points must match the weighted mean over repetitions.
  ImportanceSample s;
  s.draws.resize(5, 1);
  s.draws << -2.0, -0.5, 0.0, 1.0, 3.0;
  Eigen::VectorXd w(5);
  w << 0.05, 0.15, 0.35, 0.25, 0.2;
  s.w_norm = w;
  const double target_mean = s.draws.col(0).dot(w);

  RandomStream rng(44);
  const int reps = 10000, m = 7;
  double acc = 0.0, acc_sq = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const double mean = residual_resample(s, m, rng).col(0).mean();
    acc += mean;
    acc_sq += mean * mean;
  }
  const double grand_mean = acc / reps;
  const double se = std::sqrt((acc_sq / reps - grand_mean * grand_mean) / reps);
  CHECK(std::fabs(grand_mean - target_mean) < 3.0 * se + 1e-12);
}

TEST_CASE("independence MH") {
  SUBCASE("proposal equal to the target accepts everything") {
    TargetDensity t = normal_target();
    Mixture q = standard_normal_mixture();
    RandomStream rng(5);
    const MhChain chain = independence_mh(t, q, 500, rng);
    CHECK(chain.acceptance_rate == 1.0);
    CHECK(chain.states.rows() == 500);
  }

  SUBCASE("a far-shifted proposal is mostly rejected") {
    TargetDensity t = normal_target();
    GaussComponent shifted(Eigen::Vector2d(20.0, 0.0), Eigen::Matrix2d::Identity());
    Mixture q(Eigen::VectorXd::Ones(1), {shifted});
    RandomStream rng(6);
    Eigen::VectorXd init = Eigen::VectorXd::Zero(2);
    const MhChain chain = independence_mh(t, q, 400, rng, &init);
    CHECK(chain.acceptance_rate < 0.5);
  }

  SUBCASE("chain mean is right for an exact proposal") {
    TargetDensity t = normal_target();
    Mixture q = standard_normal_mixture();
    RandomStream rng(7);
    const MhChain chain = independence_mh(t, q, 20000, rng);
    const double se = 1.0 / std::sqrt(20000.0);
    CHECK(std::fabs(chain.states.col(0).mean()) < 5.0 * se);
    CHECK(std::fabs(chain.states.col(1).mean()) < 5.0 * se);
  }

  SUBCASE("zero-density initial state is rejected") {
    TargetDensity t(
        1,
        [](const Eigen::VectorXd& x) {
          return x[0] > 0.0 ? -x[0] : -std::numeric_limits<double>::infinity();
        },
        "half");
    Mixture q = standard_normal_mixture(1);
    RandomStream rng(8);
    Eigen::VectorXd bad(1);
    bad << -1.0;
    CHECK_THROWS_AS(independence_mh(t, q, 10, rng, &bad), std::invalid_argument);
  }
}

TEST_CASE("student proposal keeps weights finite further into the tails") {
  TargetDensity t = normal_target(1);
  Mixture g = standard_normal_mixture(1);
  StudentMixture st = mixture_to_student(g, 10.0);

  Eigen::VectorXd far(1);
  far << 15.0;
  const double lw_gauss = t.log_density(far) - mixture_logpdf(g, far);
  const double lw_student = t.log_density(far) - mixture_logpdf(st, far);
  CHECK(std::isfinite(lw_gauss));
  CHECK(std::isfinite(lw_student));
  CHECK(lw_student < lw_gauss);  // heavier proposal tail damps the weight

  // Where the Gaussian density underflows on the linear scale the t density
  // is still representable, and the log-domain weights stay finite for both.
  Eigen::VectorXd extreme(1);
  extreme << 40.0;
  CHECK(std::exp(mixture_logpdf(g, extreme)) == 0.0);
  CHECK(std::exp(mixture_logpdf(st, extreme)) > 0.0);
  CHECK(std::isfinite(t.log_density(extreme) - mixture_logpdf(g, extreme)));
  CHECK(std::isfinite(t.log_density(extreme) - mixture_logpdf(st, extreme)));
}

TEST_CASE("comparison metrics") {
  const Eigen::Vector2d ref_mean(1.0, -1.0);
  Eigen::Matrix2d ref_cov;
  ref_cov << 4.0, 0.0, 0.0, 1.0;

  // Reference quantiles of the reference distribution along the correlation
  // eigenvectors; with a diagonal covariance the correlation matrix is the
  // identity, whose eigenvectors are the coordinate axes.
  Eigen::Matrix<double, 2, 19> ref_q;
  Eigen::MatrixXd draws(4001, 2);
  {
    // Symmetric deterministic "sample" exactly matching mean and cov.
    int idx = 0;
    for (int i = -2000; i <= 2000; ++i) {
      const double u = static_cast<double>(i) / 2000.0;
      draws(idx, 0) = ref_mean[0] + 2.0 * u;
      draws(idx, 1) = ref_mean[1] + 1.0 * u;
      ++idx;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(Eigen::Matrix2d::Identity());
    for (int j = 0; j < 2; ++j) {
      const Eigen::VectorXd proj = draws * eig.eigenvectors().col(1 - j);
      for (int q = 0; q < 19; ++q)
        ref_q(j, q) = empirical_quantile(proj, 0.05 * (q + 1));
    }
  }

  SUBCASE("identical inputs give zero everywhere") {
    Eigen::MatrixXd cov = ref_cov;
    const ComparisonMetrics m =
        comparison_metrics(ref_mean, cov, draws, ref_mean, ref_cov, ref_q);
    CHECK(m.mahalanobis == 0.0);
    CHECK(m.spectral_norm < 1e-12);
    CHECK(m.quantile_err[0] < 1e-12);
    CHECK(m.quantile_err[1] < 1e-12);
  }

  SUBCASE("one reference sd of mean shift gives Mahalanobis 1") {
    const Eigen::Vector2d shifted = ref_mean + Eigen::Vector2d(2.0, 0.0);  // sd_x1 = 2
    const ComparisonMetrics m =
        comparison_metrics(shifted, ref_cov, draws, ref_mean, ref_cov, ref_q);
    CHECK(m.mahalanobis == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("diagonal covariance perturbation shows up as its largest entry") {
    Eigen::Matrix2d bumped = ref_cov;
    bumped(0, 0) += 0.3;
    bumped(1, 1) += 0.3;
    const ComparisonMetrics m =
        comparison_metrics(ref_mean, bumped, draws, ref_mean, ref_cov, ref_q);
    CHECK(m.spectral_norm == doctest::Approx(0.3).epsilon(1e-12));
  }

  SUBCASE("singular reference covariance is an error") {
    const ComparisonMetrics* unused = nullptr;
    (void)unused;
    CHECK_THROWS_AS(comparison_metrics(ref_mean, ref_cov, draws, ref_mean,
                                       Eigen::Matrix2d::Zero(), ref_q),
                    std::invalid_argument);
  }
}

TEST_CASE("empirical quantile conventions") {
  Eigen::VectorXd v(5);
  v << 10.0, 20.0, 30.0, 40.0, 50.0;
  CHECK(empirical_quantile(v, 0.5) == 30.0);
  CHECK(empirical_quantile(v, 0.0) == 10.0);
  CHECK(empirical_quantile(v, 1.0) == 50.0);
  CHECK(empirical_quantile(v, 0.25) == 20.0);
  CHECK(empirical_quantile(v, 0.125) == doctest::Approx(15.0).epsilon(1e-14));
}
