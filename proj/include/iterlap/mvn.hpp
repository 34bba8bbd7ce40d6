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

#include "iterlap/rng.hpp"

#include <Eigen/Dense>

#include <vector>

namespace iterlap {

/// A single multivariate normal component: mean, covariance and its lower
/// Cholesky factor. The covariance is symmetrized before factoring; a failed
/// factorization (not positive definite) throws std::invalid_argument.
class GaussComponent {
 public:
  GaussComponent(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);

  Eigen::Index dim() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  /// Lower-triangular L with L L^T = cov.
  const Eigen::MatrixXd& chol() const { return chol_; }
  double log_det() const { return log_det_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
  double log_det_;
};

/// log N(x; mu, Sigma), quadratic form via triangular solve.
double component_logpdf(const GaussComponent& c, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Non-negative linear combination of Gaussian components. Zero-weight
/// components stay stored (so design-matrix columns keep their indices) but
/// are skipped by the density and the sampler.
class Mixture {
 public:
  Mixture(Eigen::VectorXd weights, std::vector<GaussComponent> components);

  Eigen::Index dim() const { return components_.front().dim(); }
  Eigen::Index n_components() const { return static_cast<Eigen::Index>(components_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<GaussComponent>& components() const { return components_; }
  const GaussComponent& component(Eigen::Index j) const { return components_[j]; }
  /// Sum of weights, recomputed on every call.
  double Z() const { return weights_.sum(); }

 private:
  Eigen::VectorXd weights_;
  std::vector<GaussComponent> components_;
};

/// Same locations/scales as a Mixture with multivariate-t components of a
/// common df. Scale matrices are taken verbatim (scale convention, not the
/// t covariance).
class StudentMixture {
 public:
  StudentMixture(Eigen::VectorXd weights, std::vector<GaussComponent> components, double df);

  Eigen::Index dim() const { return components_.front().dim(); }
  Eigen::Index n_components() const { return static_cast<Eigen::Index>(components_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<GaussComponent>& components() const { return components_; }
  double df() const { return df_; }
  double Z() const { return weights_.sum(); }

 private:
  Eigen::VectorXd weights_;
  std::vector<GaussComponent> components_;
  double df_;
};

/// log sum_j w_j phi(x; mu_j, Sigma_j) via log-sum-exp. Unnormalized: the
/// weights are not divided by Z.
double mixture_logpdf(const Mixture& m, const Eigen::Ref<const Eigen::VectorXd>& x);
double mixture_logpdf(const StudentMixture& m, const Eigen::Ref<const Eigen::VectorXd>& x);

/// n draws from the weight-normalized mixture, one row per draw.
Eigen::MatrixXd mixture_sample(const Mixture& m, Eigen::Index n, RandomStream& rng);
Eigen::MatrixXd mixture_sample(const StudentMixture& m, Eigen::Index n, RandomStream& rng);

StudentMixture mixture_to_student(const Mixture& m, double df);

/// Laplace mass of a component: (2 pi)^{p/2} |Sigma|^{1/2} pi(mu),
/// assembled on the log scale.
double laplace_weight(const GaussComponent& c, double pi_at_mode);
double log_laplace_weight(const GaussComponent& c, double log_pi_at_mode);

/// log of the multivariate t density with location mu, scale Sigma, df nu.
double student_logpdf(const GaussComponent& c, double df,
                      const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace iterlap
