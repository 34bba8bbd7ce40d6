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

#include "iterlap/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iterlap {

double ness(const ImportanceSample& s) {
  const Eigen::Index n = s.w_norm.size();
  if (n < 1) throw std::invalid_argument("ness: empty sample");
  const double sum_sq = s.w_norm.squaredNorm();
  if (!(sum_sq > 0.0))
    throw std::runtime_error("ness: all importance weights are zero; diagnostic undefined");
  return 1.0 / (static_cast<double>(n) * sum_sq);
}

McDiagnostics diagnose(const ImportanceSample& s) {
  McDiagnostics d;
  d.ness = ness(s);
  d.log_z_hat = log_estimate_Z(s);
  d.z_hat = std::exp(d.log_z_hat);
  std::tie(d.mean, d.sd) = moments(s);
  return d;
}

double log_estimate_Z(const ImportanceSample& s) {
  return log_sum_exp(s.log_w) - std::log(static_cast<double>(s.log_w.size()));
}

double estimate_Z(const ImportanceSample& s) { return std::exp(log_estimate_Z(s)); }

std::pair<Eigen::VectorXd, Eigen::VectorXd> moments(const ImportanceSample& s) {
  const Eigen::Index n = s.draws.rows();
  const Eigen::Index p = s.draws.cols();
  if (n < 1) throw std::invalid_argument("moments: empty sample");
  Eigen::VectorXd mean = s.draws.transpose() * s.w_norm;
  Eigen::VectorXd sd(p);
  for (Eigen::Index d = 0; d < p; ++d) {
    const Eigen::ArrayXd centered = s.draws.col(d).array() - mean[d];
    sd[d] = std::sqrt((s.w_norm.array() * centered.square()).sum());
  }
  return {std::move(mean), std::move(sd)};
}

Eigen::MatrixXd residual_resample(const ImportanceSample& s, Eigen::Index m, RandomStream& rng) {
  if (m < 1) throw std::invalid_argument("residual_resample: m must be >= 1");
  const Eigen::Index n = s.draws.rows();
  Eigen::MatrixXd out(m, s.draws.cols());

  Eigen::Index filled = 0;
  Eigen::VectorXd residual(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double target_count = static_cast<double>(m) * s.w_norm[i];
    const auto copies = static_cast<Eigen::Index>(std::floor(target_count));
    residual[i] = target_count - static_cast<double>(copies);
    for (Eigen::Index c = 0; c < copies && filled < m; ++c) out.row(filled++) = s.draws.row(i);
  }
  while (filled < m) {
    const Eigen::Index pick = rng.categorical(residual);
    out.row(filled++) = s.draws.row(pick);
  }
  return out;
}

double empirical_quantile(Eigen::VectorXd values, double level) {
  if (values.size() < 1) throw std::invalid_argument("empirical_quantile: empty input");
  std::sort(values.data(), values.data() + values.size());
  const double h = (static_cast<double>(values.size()) - 1.0) * level;
  const auto lo = static_cast<Eigen::Index>(std::floor(h));
  const auto hi = std::min<Eigen::Index>(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ComparisonMetrics comparison_metrics(const Eigen::VectorXd& sample_mean,
                                     const Eigen::MatrixXd& sample_cov,
                                     const Eigen::MatrixXd& sample_draws,
                                     const Eigen::VectorXd& ref_mean,
                                     const Eigen::MatrixXd& ref_cov,
                                     const Eigen::Matrix<double, 2, 19>& ref_quantiles) {
  const Eigen::Index p = ref_mean.size();
  Eigen::LLT<Eigen::MatrixXd> llt(ref_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("comparison_metrics: reference covariance is singular");

  ComparisonMetrics out;
  const Eigen::VectorXd diff = sample_mean - ref_mean;
  out.mahalanobis = std::sqrt(diff.dot(llt.solve(diff)));

  const Eigen::MatrixXd D = sample_cov - ref_cov;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
  out.spectral_norm = svd.singularValues()[0];

  // Eigenvectors of the reference correlation matrix, leading first.
  const Eigen::VectorXd inv_sd = ref_cov.diagonal().array().sqrt().inverse();
  const Eigen::MatrixXd corr = inv_sd.asDiagonal() * ref_cov * inv_sd.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd e = eig.eigenvectors().col(p - 1 - j);
    const Eigen::VectorXd projected = sample_draws * e;
    double acc = 0.0;
    for (int q = 0; q < 19; ++q) {
      const double level = 0.05 * (q + 1);
      acc += std::fabs(empirical_quantile(projected, level) - ref_quantiles(j, q));
    }
    out.quantile_err[j] = acc / 19.0;
  }
  return out;
}

}  // namespace iterlap
