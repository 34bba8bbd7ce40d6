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

#include "iterlap/target.hpp"

#include "iterlap/mvn.hpp"
#include "iterlap/special.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace iterlap {

TargetDensity::TargetDensity(Eigen::Index dim, LogDensityFn log_f, std::string label)
    : dim_(dim),
      log_f_(std::move(log_f)),
      label_(std::move(label)),
      evals_(std::make_shared<std::atomic<long long>>(0)) {
  if (dim < 1) throw std::invalid_argument("TargetDensity: dimension must be positive");
  if (!log_f_) throw std::invalid_argument("TargetDensity: null evaluator");
}

double TargetDensity::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("TargetDensity::log_density: dimension mismatch for '" + label_ +
                                "'");
  evals_->fetch_add(1, std::memory_order_relaxed);
  return log_f_(x);
}

TargetDensity make_illustration1d() {
  return TargetDensity(
      1,
      [](const Eigen::VectorXd& x) {
        Eigen::Vector2d terms(normal_logpdf(x[0], 0.0, 1.0),
                              std::log(0.5) + normal_logpdf(x[0], -3.0, 2.0));
        return log_sum_exp(terms);
      },
      "illustration1d");
}

TargetDensity make_skew_t(const Eigen::Vector2d& xi, const Eigen::Matrix2d& Omega,
                          const Eigen::Vector2d& alpha, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("make_skew_t: nu must be positive");
  Eigen::LLT<Eigen::Matrix2d> llt(0.5 * (Omega + Omega.transpose()));
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("make_skew_t: Omega is not positive definite");

  const Eigen::Matrix2d L = llt.matrixL();
  const double log_det = 2.0 * std::log(L(0, 0)) + 2.0 * std::log(L(1, 1));
  const Eigen::Vector2d omega_inv(1.0 / std::sqrt(Omega(0, 0)), 1.0 / std::sqrt(Omega(1, 1)));
  const double p = 2.0;
  const double log_t_const = std::lgamma(0.5 * (nu + p)) - std::lgamma(0.5 * nu) -
                             0.5 * p * std::log(nu * M_PI) - 0.5 * log_det;

  return TargetDensity(
      2,
      [=](const Eigen::VectorXd& x) {
        const Eigen::Vector2d d = x.head<2>() - xi;
        const Eigen::Vector2d u = L.triangularView<Eigen::Lower>().solve(d);
        const double q = u.squaredNorm();
        const double log_t = log_t_const - 0.5 * (nu + p) * std::log1p(q / nu);
        const double arg =
            alpha.dot(omega_inv.cwiseProduct(d)) * std::sqrt((nu + p) / (nu + q));
        return std::log(2.0) + log_t + student_t_log_cdf(arg, nu + p);
      },
      "skew_t");
}

TargetDensity make_skew_t_default() {
  Eigen::Matrix2d Omega;
  Omega << 1.0, -0.9, -0.9, 1.0;
  return make_skew_t(Eigen::Vector2d::Zero(), Omega, Eigen::Vector2d(0.0, 15.0), 5.0);
}

TargetDensity make_trimodal() {
  Eigen::Matrix2d S1 = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d S2, S3;
  S2 << 1.0, 0.9, 0.9, 1.0;
  S3 << 1.0, -0.9, -0.9, 1.0;
  std::vector<GaussComponent> comps;
  comps.emplace_back(Eigen::Vector2d(0.0, 0.0), S1);
  comps.emplace_back(Eigen::Vector2d(-3.0, -3.0), S2);
  comps.emplace_back(Eigen::Vector2d(2.0, 2.0), S3);
  auto mix = std::make_shared<Mixture>(Eigen::Vector3d(0.34, 0.33, 0.33), std::move(comps));
  return TargetDensity(
      2, [mix](const Eigen::VectorXd& x) { return mixture_logpdf(*mix, x); }, "trimodal");
}

TargetDensity make_banana(double b, double sigma1_sq, int dim) {
  if (dim < 2) throw std::invalid_argument("make_banana: dim must be >= 2");
  if (!(sigma1_sq > 0.0)) throw std::invalid_argument("make_banana: sigma1_sq must be positive");
  return TargetDensity(
      dim,
      [b, sigma1_sq](const Eigen::VectorXd& x) {
        const double t2 = x[1] + b * (x[0] * x[0] - sigma1_sq);
        double q = x[0] * x[0] / sigma1_sq + t2 * t2;
        q += x.tail(x.size() - 2).squaredNorm();
        return -0.5 * q;
      },
      "banana");
}

EnsoDataset load_enso(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_enso: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_enso: empty file '" + path + "'");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "pressure,month")
    throw std::runtime_error("load_enso: expected header 'pressure,month', got '" + line + "'");

  constexpr int n = 168;
  EnsoDataset data;
  data.pressure.resize(n);
  data.month.resize(n);
  int row = 0;
  while (std::getline(in, line)) {
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) throw std::runtime_error("load_enso: more than 168 data rows");
    std::istringstream ss(line);
    std::string a, bfield;
    if (!std::getline(ss, a, ',') || !std::getline(ss, bfield))
      throw std::runtime_error("load_enso: malformed row " + std::to_string(row + 2));
    try {
      std::size_t used = 0;
      data.pressure[row] = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      data.month[row] = std::stoi(bfield, &used);
      if (used != bfield.size()) throw std::invalid_argument(bfield);
    } catch (const std::exception&) {
      throw std::runtime_error("load_enso: non-numeric entry in row " + std::to_string(row + 2));
    }
    if (data.month[row] != row + 1)
      throw std::runtime_error("load_enso: month index out of order in row " +
                               std::to_string(row + 2));
    ++row;
  }
  if (row != n)
    throw std::runtime_error("load_enso: expected 168 data rows, found " + std::to_string(row));
  return data;
}

Eigen::VectorXd load_enso_start(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_enso_start: cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  Eigen::VectorXd theta(11);
  theta[0] = j.at("alpha").get<double>();
  const auto& A = j.at("A");
  const auto& B = j.at("B");
  const auto& lambda = j.at("lambda");
  if (A.size() != 3 || B.size() != 3 || lambda.size() != 3)
    throw std::runtime_error("load_enso_start: A, B, lambda must each have 3 entries");
  for (int k = 0; k < 3; ++k) {
    theta[1 + 2 * k] = A[k].get<double>();
    theta[2 + 2 * k] = B[k].get<double>();
    theta[7 + k] = lambda[k].get<double>();
  }
  theta[10] = j.at("log_sigma").get<double>();
  return theta;
}

double enso_mean(const Eigen::Ref<const Eigen::VectorXd>& theta, int i) {
  double mu = theta[0];
  for (int k = 0; k < 3; ++k) {
    const double w = 2.0 * M_PI * i / theta[7 + k];
    mu += theta[1 + 2 * k] * std::sin(w) + theta[2 + 2 * k] * std::cos(w);
  }
  return mu;
}

TargetDensity make_enso_posterior(const EnsoDataset& data, const EnsoPrior& prior) {
  if (data.pressure.size() != 168)
    throw std::invalid_argument("make_enso_posterior: dataset must have 168 observations");
  const Eigen::VectorXd y = data.pressure;
  const double n = static_cast<double>(y.size());

  auto log_cauchy = [](double x, double scale) {
    const double z = x / scale;
    return -std::log(M_PI * scale) - std::log1p(z * z);
  };

  return TargetDensity(
      11,
      [y, n, prior, log_cauchy](const Eigen::VectorXd& theta) {
        for (int k = 0; k < 3; ++k) {
          const double lam = theta[7 + k];
          if (!(lam > 0.0) || lam > prior.lambda_upper)
            return -std::numeric_limits<double>::infinity();
        }
        const double log_sigma = theta[10];
        const double sigma_sq = std::exp(2.0 * log_sigma);

        double rss = 0.0;
        for (int i = 0; i < y.size(); ++i) {
          const double r = y[i] - enso_mean(theta, i + 1);
          rss += r * r;
        }
        double lp = -0.5 * n * (log_2pi + 2.0 * log_sigma) - 0.5 * rss / sigma_sq;

        lp += log_cauchy(theta[0], prior.alpha_scale);
        for (int k = 0; k < 3; ++k) {
          lp += log_cauchy(theta[1 + 2 * k], prior.coef_scale);
          lp += log_cauchy(theta[2 + 2 * k], prior.coef_scale);
        }
        lp -= 3.0 * std::log(prior.lambda_upper);
        // gamma(shape, rate) prior on sigma plus the log-transform Jacobian,
        // written directly in log sigma.
        lp += prior.gamma_shape * std::log(prior.gamma_rate) - std::lgamma(prior.gamma_shape) +
              prior.gamma_shape * log_sigma - prior.gamma_rate * std::exp(log_sigma);
        return lp;
      },
      "enso_posterior");
}

}  // namespace iterlap
