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

#include "iterlap/mvn.hpp"

#include <stdexcept>

namespace iterlap {

GaussComponent::GaussComponent(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
    : mean_(std::move(mean)) {
  if (cov.rows() != cov.cols() || cov.rows() != mean_.size())
    throw std::invalid_argument("GaussComponent: covariance shape does not match mean");
  cov_ = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("GaussComponent: covariance is not positive definite");
  chol_ = llt.matrixL();
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

double component_logpdf(const GaussComponent& c, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != c.dim()) throw std::invalid_argument("component_logpdf: dimension mismatch");
  const Eigen::VectorXd u =
      c.chol().triangularView<Eigen::Lower>().solve(x - c.mean());
  return -0.5 * c.dim() * log_2pi - 0.5 * c.log_det() - 0.5 * u.squaredNorm();
}

double student_logpdf(const GaussComponent& c, double df,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != c.dim()) throw std::invalid_argument("student_logpdf: dimension mismatch");
  const double p = static_cast<double>(c.dim());
  const Eigen::VectorXd u =
      c.chol().triangularView<Eigen::Lower>().solve(x - c.mean());
  const double q = u.squaredNorm();
  return std::lgamma(0.5 * (df + p)) - std::lgamma(0.5 * df) - 0.5 * p * std::log(df * M_PI) -
         0.5 * c.log_det() - 0.5 * (df + p) * std::log1p(q / df);
}

namespace {

void check_mixture(const Eigen::VectorXd& weights, const std::vector<GaussComponent>& components) {
  if (components.empty()) throw std::invalid_argument("Mixture: no components");
  if (weights.size() != static_cast<Eigen::Index>(components.size()))
    throw std::invalid_argument("Mixture: weight/component count mismatch");
  if ((weights.array() < 0.0).any())
    throw std::invalid_argument("Mixture: negative weight");
  const Eigen::Index p = components.front().dim();
  for (const auto& c : components)
    if (c.dim() != p) throw std::invalid_argument("Mixture: components differ in dimension");
}

template <class M, class LogPdf>
double weighted_logsumexp(const M& m, const Eigen::Ref<const Eigen::VectorXd>& x, LogPdf logpdf) {
  if (x.size() != m.dim()) throw std::invalid_argument("mixture_logpdf: dimension mismatch");
  bool any_positive = false;
  Eigen::VectorXd terms(m.n_components());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m.n_components(); ++j) {
    const double w = m.weights()[j];
    if (w <= 0.0) continue;
    any_positive = true;
    terms[k++] = std::log(w) + logpdf(m.components()[j], x);
  }
  if (!any_positive) throw std::logic_error("mixture_logpdf: all weights are zero");
  return log_sum_exp(terms.head(k));
}

template <class M, class DrawTail>
Eigen::MatrixXd sample_impl(const M& m, Eigen::Index n, RandomStream& rng, DrawTail tail_scale) {
  if (!(m.Z() > 0.0)) throw std::logic_error("mixture_sample: total weight is zero");
  const Eigen::Index p = m.dim();
  Eigen::MatrixXd out(n, p);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = rng.categorical(m.weights());
    for (Eigen::Index d = 0; d < p; ++d) z[d] = rng.normal();
    const GaussComponent& c = m.components()[j];
    const Eigen::VectorXd lz = c.chol().triangularView<Eigen::Lower>() * z;
    out.row(i) = (c.mean() + tail_scale(rng) * lz).transpose();
  }
  return out;
}

}  // namespace

Mixture::Mixture(Eigen::VectorXd weights, std::vector<GaussComponent> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  check_mixture(weights_, components_);
}

StudentMixture::StudentMixture(Eigen::VectorXd weights, std::vector<GaussComponent> components,
                               double df)
    : weights_(std::move(weights)), components_(std::move(components)), df_(df) {
  check_mixture(weights_, components_);
  if (!(df > 0.0)) throw std::invalid_argument("StudentMixture: df must be positive");
}

double mixture_logpdf(const Mixture& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return weighted_logsumexp(m, x, [](const GaussComponent& c, const auto& xx) {
    return component_logpdf(c, xx);
  });
}

double mixture_logpdf(const StudentMixture& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double df = m.df();
  return weighted_logsumexp(m, x, [df](const GaussComponent& c, const auto& xx) {
    return student_logpdf(c, df, xx);
  });
}

Eigen::MatrixXd mixture_sample(const Mixture& m, Eigen::Index n, RandomStream& rng) {
  return sample_impl(m, n, rng, [](RandomStream&) { return 1.0; });
}

Eigen::MatrixXd mixture_sample(const StudentMixture& m, Eigen::Index n, RandomStream& rng) {
  const double df = m.df();
  return sample_impl(m, n, rng, [df](RandomStream& r) {
    return 1.0 / std::sqrt(r.chi_squared(df) / df);
  });
}

StudentMixture mixture_to_student(const Mixture& m, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("mixture_to_student: df must be positive");
  return StudentMixture(m.weights(), m.components(), df);
}

double log_laplace_weight(const GaussComponent& c, double log_pi_at_mode) {
  return 0.5 * c.dim() * log_2pi + 0.5 * c.log_det() + log_pi_at_mode;
}

double laplace_weight(const GaussComponent& c, double pi_at_mode) {
  if (!(pi_at_mode > 0.0)) throw std::invalid_argument("laplace_weight: pi(mode) must be positive");
  return std::exp(log_laplace_weight(c, std::log(pi_at_mode)));
}

}  // namespace iterlap
