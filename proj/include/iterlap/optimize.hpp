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

#include <functional>
#include <optional>
#include <vector>

namespace iterlap {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimConfig {
  double gtol = 1e-6;   // gradient max-norm tolerance, relative to max(1,|f|)
  double xtol = 1e-10;  // step max-norm tolerance, relative to 1+|x|
  int max_iter = 200;
};

struct OptimResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
  double grad_norm = 0.0;
  bool converged = false;  // true only when the gradient criterion holds
  int n_evals = 0;
};

struct HessianResult {
  Eigen::MatrixXd H;
  bool neg_definite = false;
  std::optional<Eigen::MatrixXd> neg_inv;  // (-H)^{-1} when neg_definite
};

/// Quasi-Newton ascent with central-difference gradients; falls back to
/// Nelder-Mead when the line search fails twice in a row. NaN objective
/// values are treated as rejected points, never propagated.
OptimResult maximize(const Objective& f, Eigen::VectorXd start, const OptimConfig& cfg = {});

/// Central differences with step h_i = cbrt(eps) * (1 + |x_i|).
/// Throws if the objective is non-finite at a stencil point.
Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x);

/// Central second differences with step h_i = eps^{1/4} * (1 + |x_i|);
/// the result is exactly symmetric. Negative definiteness is decided by a
/// Cholesky factorization of -H.
HessianResult numerical_hessian(const Objective& f, const Eigen::VectorXd& x);

struct KMeansResult {
  Eigen::MatrixXd centers;            // k' x p with k' <= k distinct centers
  std::vector<double> wcss_history;   // within-cluster sum of squares per Lloyd pass
  bool degenerate = false;            // fewer than k distinct centers found
};

/// Seeded k-means++ initialization followed by Lloyd iterations until the
/// assignment reaches a fixpoint (at most 100 passes).
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

}  // namespace iterlap
