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

#include <cmath>
#include <limits>

namespace iterlap {

inline constexpr double log_2pi = 1.8378770664093454836;

/// log(sum(exp(v))) without overflow; returns -inf for an all -inf input.
inline double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf (or a stray +inf propagates)
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
  return m + std::log(acc);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_logpdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * log_2pi;
}

/// Inverse standard normal CDF. Acklam's rational approximation followed by
/// one Halley step against erfc, good to ~1e-15 over (0,1).
double inverse_normal_cdf(double u);

/// Regularized incomplete beta I_x(a, b) via the continued-fraction expansion.
double reg_inc_beta(double a, double b, double x);

/// CDF of the Student-t distribution with df degrees of freedom.
double student_t_cdf(double x, double df);

/// log CDF of the Student-t distribution, finite far into the left tail.
double student_t_log_cdf(double x, double df);

}  // namespace iterlap
