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

#include <Eigen/Dense>

#include <atomic>
#include <functional>
#include <memory>
#include <string>

namespace iterlap {

/// An unnormalized log-density on R^p with a thread-safe evaluation counter.
/// The evaluator must return a finite value or -inf for finite input, never
/// NaN, and must be safe to call concurrently.
class TargetDensity {
 public:
  using LogDensityFn = std::function<double(const Eigen::VectorXd&)>;

  TargetDensity(Eigen::Index dim, LogDensityFn log_f, std::string label);

  Eigen::Index dim() const { return dim_; }
  const std::string& label() const { return label_; }

  /// log pi(x); increments the evaluation counter by exactly one.
  double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  long long eval_count() const { return evals_->load(); }
  void reset_eval_count() const { evals_->store(0); }

 private:
  Eigen::Index dim_;
  LogDensityFn log_f_;
  std::string label_;
  std::shared_ptr<std::atomic<long long>> evals_;
};

/// pi(x) = phi(x,0,1) + 0.5 phi(x,-3,2), sigma meaning standard deviation.
/// Normalization constant 1.5.
TargetDensity make_illustration1d();

/// Azzalini-Capitanio bivariate skew-t density
///   2 t_2(x; xi, Omega, nu) T_1(alpha' omega^{-1} (x - xi)
///        sqrt((nu+2)/(nu+Q(x))); nu+2),
/// normalized. Throws for a non-positive-definite Omega or nu <= 0.
TargetDensity make_skew_t(const Eigen::Vector2d& xi, const Eigen::Matrix2d& Omega,
                          const Eigen::Vector2d& alpha, double nu);

/// The default skew-t test instance: xi = 0, Omega = [[1,-0.9],[-0.9,1]],
/// alpha = (0,15), nu = 5.
TargetDensity make_skew_t_default();

/// Trimodal mixture of three bivariate normals,
/// 0.34 phi(x,(0,0),I) + 0.33 phi(x,(-3,-3),S+) + 0.33 phi(x,(2,2),S-)
/// with correlations +0.9 and -0.9. Normalized.
TargetDensity make_trimodal();

/// Banana-shaped kernel in `dim` dimensions:
///   f(x) proportional to phi(t(x), 0, diag(s1sq, 1, ..., 1)),
///   t(x) = (x1, x2 + b (x1^2 - s1sq), x3, ..., x_dim).
TargetDensity make_banana(double b = 0.03, double sigma1_sq = 100.0, int dim = 10);

struct EnsoDataset {
  Eigen::VectorXd pressure;  // 168 monthly pressure differences
  Eigen::VectorXi month;     // 1..168
};

struct EnsoPrior {
  double alpha_scale = 100.0;  // Cauchy scale for the intercept
  double coef_scale = 10.0;    // Cauchy scale for the harmonic coefficients
  double lambda_upper = 100.0; // uniform upper bound on each period
  double gamma_shape = 0.1;
  double gamma_rate = 0.1;
};

/// Reads the `pressure,month` CSV with exactly 168 data rows.
EnsoDataset load_enso(const std::string& path);

/// Starting point for the posterior optimization, as
/// theta = (alpha, A1, B1, A2, B2, A3, B3, lambda1, lambda2, lambda3, log sigma).
Eigen::VectorXd load_enso_start(const std::string& path);

/// 11-dimensional posterior of the harmonic pressure regression
///   y_i ~ N(alpha + sum_k A_k sin(2 pi i / lambda_k)
///                 + B_k cos(2 pi i / lambda_k), sigma^2)
/// with Cauchy priors on the linear coefficients, uniform(0,100] periods and
/// a gamma(0.1, 0.1) prior on sigma expressed in log sigma (Jacobian
/// included). Periods outside (0,100] give log-density -inf.
TargetDensity make_enso_posterior(const EnsoDataset& data, const EnsoPrior& prior = {});

/// Conditional mean mu(i) of the regression at time index i (1-based).
double enso_mean(const Eigen::Ref<const Eigen::VectorXd>& theta, int i);

}  // namespace iterlap
