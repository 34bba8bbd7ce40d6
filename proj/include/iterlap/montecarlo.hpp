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

#pragma once

#include "iterlap/mvn.hpp"
#include "iterlap/target.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace iterlap {

struct ImportanceSample {
  Eigen::MatrixXd draws;   // N x p
  Eigen::VectorXd log_w;   // log pi - log q, unnormalized
  Eigen::VectorXd w_norm;  // softmax of log_w; all-zero when pi vanished everywhere
};

struct McDiagnostics {
  double ness = 0.0;
  double z_hat = 0.0;      // physical normalization-constant estimate
  double log_z_hat = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

/// N draws from the weight-normalized proposal with importance weights
/// against the (unnormalized) target.
template <class Proposal>
ImportanceSample importance_sample(const TargetDensity& target, const Proposal& proposal,
                                   Eigen::Index n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("importance_sample: n must be >= 1");
  if (!(proposal.Z() > 0.0)) throw std::logic_error("importance_sample: proposal has zero mass");
  const double log_z = std::log(proposal.Z());
  ImportanceSample s;
  s.draws = mixture_sample(proposal, n, rng);
  s.log_w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = s.draws.row(i).transpose();
    s.log_w[i] = target.log_density(x) - (mixture_logpdf(proposal, x) - log_z);
  }
  const double lse = log_sum_exp(s.log_w);
  s.w_norm.resize(n);
  if (std::isfinite(lse)) {
    s.w_norm = (s.log_w.array() - lse).exp();
  } else {
    s.w_norm.setZero();
  }
  return s;
}

/// Normalized effective sample size 1/(N sum w~_i^2), in (0,1].
double ness(const ImportanceSample& s);

/// NESS, Z estimate and weighted moments bundled for reporting.
McDiagnostics diagnose(const ImportanceSample& s);

/// Unbiased physical-scale estimate (1/N) sum pi(x_i)/q(x_i), via log-sum-exp.
double estimate_Z(const ImportanceSample& s);
double log_estimate_Z(const ImportanceSample& s);

/// Weighted mean and (population) standard deviation per coordinate.
std::pair<Eigen::VectorXd, Eigen::VectorXd> moments(const ImportanceSample& s);

/// Residual resampling: floor(m w~_i) deterministic copies, the remaining
/// slots multinomial on the fractional parts.
Eigen::MatrixXd residual_resample(const ImportanceSample& s, Eigen::Index m, RandomStream& rng);

struct MhChain {
  Eigen::MatrixXd states;  // N x p
  double acceptance_rate = 0.0;
};

/// Independence Metropolis-Hastings with the mixture as the fixed proposal.
/// The chain starts at `init` when given, otherwise at the first proposal
/// draw with positive target density.
template <class Proposal>
MhChain independence_mh(const TargetDensity& target, const Proposal& proposal, Eigen::Index n,
                        RandomStream& rng, const Eigen::VectorXd* init = nullptr) {
  if (n < 1) throw std::invalid_argument("independence_mh: n must be >= 1");
  const Eigen::Index p = target.dim();

  Eigen::VectorXd x;
  double log_ratio_x;  // log pi(x) - log q(x), q unnormalized is fine (constant cancels)
  if (init) {
    x = *init;
    const double lp = target.log_density(x);
    if (!std::isfinite(lp))
      throw std::invalid_argument("independence_mh: initial state has zero density");
    log_ratio_x = lp - mixture_logpdf(proposal, x);
  } else {
    bool found = false;
    for (int tries = 0; tries < 100 && !found; ++tries) {
      x = mixture_sample(proposal, 1, rng).row(0).transpose();
      const double lp = target.log_density(x);
      if (std::isfinite(lp)) {
        log_ratio_x = lp - mixture_logpdf(proposal, x);
        found = true;
      }
    }
    if (!found)
      throw std::runtime_error("independence_mh: no proposal draw hit the target support");
  }

  MhChain chain;
  chain.states.resize(n, p);
  Eigen::Index accepted = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd prop = mixture_sample(proposal, 1, rng).row(0).transpose();
    const double log_ratio_prop = target.log_density(prop) - mixture_logpdf(proposal, prop);
    const double log_alpha = log_ratio_prop - log_ratio_x;
    if (log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha) {
      x = prop;
      log_ratio_x = log_ratio_prop;
      ++accepted;
    }
    chain.states.row(i) = x.transpose();
  }
  chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(n);
  return chain;
}

struct ComparisonMetrics {
  double mahalanobis = 0.0;
  double spectral_norm = 0.0;
  std::array<double, 2> quantile_err{0.0, 0.0};
};

/// Distance of estimated posterior summaries from gold-standard references:
/// Mahalanobis distance of the mean, spectral norm of the covariance gap,
/// and mean absolute quantile error at levels 0.05..0.95 along the first two
/// eigenvectors of the reference correlation matrix.
ComparisonMetrics comparison_metrics(const Eigen::VectorXd& sample_mean,
                                     const Eigen::MatrixXd& sample_cov,
                                     const Eigen::MatrixXd& sample_draws,
                                     const Eigen::VectorXd& ref_mean,
                                     const Eigen::MatrixXd& ref_cov,
                                     const Eigen::Matrix<double, 2, 19>& ref_quantiles);

/// Type-7 (linear interpolation) empirical quantile of the values.
double empirical_quantile(Eigen::VectorXd values, double level);

}  // namespace iterlap
