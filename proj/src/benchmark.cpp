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

#include "iterlap/benchmark.hpp"

#include "iterlap/serialize.hpp"
#include "iterlap/special.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace iterlap {

BenchCase bench_case_from_string(const std::string& name) {
  if (name == "f1") return BenchCase::F1;
  if (name == "f2") return BenchCase::F2;
  if (name == "f3") return BenchCase::F3;
  if (name == "illustration1d") return BenchCase::Illustration1d;
  throw std::invalid_argument("unknown case '" + name + "'");
}

ApproxMethod method_from_string(const std::string& name) {
  if (name == "laplace") return ApproxMethod::Laplace;
  if (name == "iterlap") return ApproxMethod::IterLap;
  throw std::invalid_argument("unknown method '" + name + "'");
}

ReportFormat format_from_string(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "table") return ReportFormat::Table;
  throw std::invalid_argument("unknown format '" + name + "'");
}

std::string to_string(BenchCase c) {
  switch (c) {
    case BenchCase::F1: return "f1";
    case BenchCase::F2: return "f2";
    case BenchCase::F3: return "f3";
    case BenchCase::Illustration1d: return "illustration1d";
  }
  return "unknown";
}

std::string to_string(ApproxMethod m) {
  return m == ApproxMethod::Laplace ? "laplace" : "iterlap";
}

TargetDensity make_bench_target(BenchCase c) {
  switch (c) {
    case BenchCase::F1: return make_skew_t_default();
    case BenchCase::F2: return make_trimodal();
    case BenchCase::F3: return make_banana();
    case BenchCase::Illustration1d: return make_illustration1d();
  }
  throw std::invalid_argument("make_bench_target: bad case");
}

namespace {

ReferenceMoments skew_t_moments(const Eigen::Matrix2d& Omega, const Eigen::Vector2d& alpha,
                                double nu) {
  // Standard skew-t moment formulas; valid for nu > 2.
  const Eigen::Vector2d omega = Omega.diagonal().array().sqrt();
  const Eigen::Matrix2d corr =
      omega.cwiseInverse().asDiagonal() * Omega * omega.cwiseInverse().asDiagonal();
  const Eigen::Vector2d ca = corr * alpha;
  const Eigen::Vector2d delta = ca / std::sqrt(1.0 + alpha.dot(ca));
  const double b_nu =
      std::sqrt(nu / M_PI) * std::exp(std::lgamma(0.5 * (nu - 1.0)) - std::lgamma(0.5 * nu));
  ReferenceMoments rm;
  const Eigen::Vector2d shift = omega.cwiseProduct(delta) * b_nu;
  rm.mean = shift;
  const Eigen::Matrix2d cov = (nu / (nu - 2.0)) * Omega - shift * shift.transpose();
  rm.sd = cov.diagonal().array().sqrt();
  return rm;
}

}  // namespace

ReferenceMoments reference_moments(BenchCase c) {
  ReferenceMoments rm;
  switch (c) {
    case BenchCase::F1: {
      Eigen::Matrix2d Omega;
      Omega << 1.0, -0.9, -0.9, 1.0;
      return skew_t_moments(Omega, Eigen::Vector2d(0.0, 15.0), 5.0);
    }
    case BenchCase::F2: {
      const Eigen::Vector3d w(0.34, 0.33, 0.33);
      const double means[3] = {0.0, -3.0, 2.0};  // same in both coordinates
      double m1 = 0.0, m2 = 0.0;
      for (int j = 0; j < 3; ++j) {
        m1 += w[j] * means[j];
        m2 += w[j] * (1.0 + means[j] * means[j]);  // unit marginal variances
      }
      rm.mean = Eigen::Vector2d(m1, m1);
      rm.sd = Eigen::Vector2d::Constant(std::sqrt(m2 - m1 * m1));
      return rm;
    }
    case BenchCase::F3: {
      const double b = 0.03, s1sq = 100.0;
      rm.mean = Eigen::VectorXd::Zero(10);
      rm.sd = Eigen::VectorXd::Ones(10);
      rm.sd[0] = std::sqrt(s1sq);
      rm.sd[1] = std::sqrt(1.0 + 2.0 * b * b * s1sq * s1sq);
      return rm;
    }
    case BenchCase::Illustration1d: {
      // weights 1 and 0.5 on N(0,1) and N(-3,4); total mass 1.5.
      const double m1 = (1.0 * 0.0 + 0.5 * -3.0) / 1.5;
      const double m2 = (1.0 * 1.0 + 0.5 * (4.0 + 9.0)) / 1.5;
      rm.mean = Eigen::VectorXd::Constant(1, m1);
      rm.sd = Eigen::VectorXd::Constant(1, std::sqrt(m2 - m1 * m1));
      return rm;
    }
  }
  throw std::invalid_argument("reference_moments: bad case");
}

Mixture laplace_single_mode(const TargetDensity& target, const Eigen::VectorXd& start,
                            const OptimConfig& optim) {
  const auto log_pi = [&target](const Eigen::VectorXd& x) { return target.log_density(x); };
  const OptimResult opt = maximize(log_pi, start, optim);
  if (!opt.converged) throw std::runtime_error("laplace_single_mode: optimizer did not converge");
  const HessianResult hess = numerical_hessian(log_pi, opt.argmax);
  if (!hess.neg_definite)
    throw std::runtime_error("laplace_single_mode: Hessian not negative definite at the mode");
  GaussComponent comp(opt.argmax, *hess.neg_inv);
  const double w = std::exp(log_laplace_weight(comp, opt.value));
  return Mixture(Eigen::VectorXd::Constant(1, w), {std::move(comp)});
}

BenchmarkReport run_benchmark(BenchCase c, ApproxMethod method, int reps, int n_samples,
                              std::uint64_t seed, const IterLapConfig* config) {
  if (reps < 1 || n_samples < 1)
    throw std::invalid_argument("run_benchmark: reps and samples must be >= 1");

  const TargetDensity target = make_bench_target(c);
  const Eigen::VectorXd start = Eigen::VectorXd::Zero(target.dim());
  const ReferenceMoments ref = reference_moments(c);

  BenchmarkReport rep;
  rep.case_name = to_string(c);
  rep.method = to_string(method);
  rep.reps = reps;
  rep.n_samples = n_samples;
  rep.seed = seed;

  IterLapConfig cfg = config ? *config : IterLapConfig{};
  cfg.seed = seed;

  Mixture proposal = [&] {
    if (method == ApproxMethod::IterLap) {
      IterLapResult result = run_iterlap(target, {start}, cfg);
      rep.n_components = static_cast<int>(result.mixture.n_components());
      rep.stop_reason = to_string(result.stop_reason.kind);
      return result.mixture;
    }
    Mixture m = laplace_single_mode(target, start, cfg.optim);
    rep.n_components = 1;
    rep.stop_reason = "n/a";
    return m;
  }();
  rep.n_evals = target.eval_count();

  const Eigen::Index p = target.dim();
  Eigen::ArrayXd ness_values(reps);
  rep.mean_err = Eigen::VectorXd::Zero(p);
  rep.sd_err = Eigen::VectorXd::Zero(p);
  for (int r = 0; r < reps; ++r) {
    RandomStream rng(mix_seed(seed, 1000 + static_cast<std::uint64_t>(r)));
    const ImportanceSample s = importance_sample(target, proposal, n_samples, rng);
    ness_values[r] = ness(s);
    const auto [mean, sd] = moments(s);
    rep.mean_err += ((mean - ref.mean).cwiseAbs().array() / ref.sd.array()).matrix();
    rep.sd_err += ((sd - ref.sd).cwiseAbs().array() / ref.sd.array()).matrix();
  }
  rep.mean_err /= static_cast<double>(reps);
  rep.sd_err /= static_cast<double>(reps);
  rep.ness_mean = ness_values.mean();
  rep.ness_sd = reps > 1 ? std::sqrt((ness_values - rep.ness_mean).square().sum() / (reps - 1))
                         : 0.0;
  return rep;
}

nlohmann::json report_to_json(const BenchmarkReport& r) {
  return nlohmann::json{{"case", r.case_name},
                        {"method", r.method},
                        {"reps", r.reps},
                        {"samples", r.n_samples},
                        {"seed", r.seed},
                        {"ness_mean", r.ness_mean},
                        {"ness_sd", r.ness_sd},
                        {"mean_err", std::vector<double>(r.mean_err.data(),
                                                         r.mean_err.data() + r.mean_err.size())},
                        {"sd_err", std::vector<double>(r.sd_err.data(),
                                                       r.sd_err.data() + r.sd_err.size())},
                        {"n_components", r.n_components},
                        {"n_evals", r.n_evals},
                        {"stop_reason", r.stop_reason}};
}

std::string emit_report(const BenchmarkReport& r, ReportFormat format) {
  auto num = [](double v, int prec = 6) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return std::string(buf);
  };

  switch (format) {
    case ReportFormat::Json:
      return report_to_json(r).dump(2) + "\n";
    case ReportFormat::Csv: {
      std::ostringstream out;
      out << "case,method,reps,samples,seed,ness_mean,ness_sd,mean_err_x1,sd_err_x1,"
             "mean_err_x2,sd_err_x2,n_components,n_evals,stop_reason\n";
      out << r.case_name << ',' << r.method << ',' << r.reps << ',' << r.n_samples << ','
          << r.seed << ',' << num(r.ness_mean) << ',' << num(r.ness_sd) << ','
          << num(r.mean_err[0]) << ',' << num(r.sd_err[0]) << ','
          << (r.mean_err.size() > 1 ? num(r.mean_err[1]) : "") << ','
          << (r.sd_err.size() > 1 ? num(r.sd_err[1]) : "") << ',' << r.n_components << ','
          << r.n_evals << ',' << r.stop_reason << '\n';
      return out.str();
    }
    case ReportFormat::Table: {
      char line[256];
      std::ostringstream out;
      out << "Density  Method      NESS          Mean_x1  sd_x1    Mean_x2  sd_x2\n";
      const double m2 = r.mean_err.size() > 1 ? r.mean_err[1] : 0.0;
      const double s2 = r.sd_err.size() > 1 ? r.sd_err[1] : 0.0;
      std::snprintf(line, sizeof(line), "%-8s %-10s %5.2f (%4.2f)  %-8.2f %-8.2f %-8.2f %-8.2f\n",
                    r.case_name.c_str(), r.method.c_str(), r.ness_mean, r.ness_sd, r.mean_err[0],
                    r.sd_err[0], m2, s2);
      out << line;
      return out.str();
    }
  }
  throw std::invalid_argument("emit_report: bad format");
}

EnsoReport run_enso(const std::string& data_path, const std::string& start_path,
                    std::uint64_t seed, int n_is, int n_resample, double df,
                    const IterLapConfig* config) {
  const EnsoDataset data = load_enso(data_path);
  const Eigen::VectorXd start = load_enso_start(start_path);
  const TargetDensity target = make_enso_posterior(data);

  IterLapConfig cfg = config ? *config : IterLapConfig{};
  cfg.seed = seed;

  EnsoReport out;
  const IterLapResult result = run_iterlap(target, {start}, cfg);
  out.n_components = static_cast<int>(result.mixture.n_components());
  out.stop_reason = to_string(result.stop_reason.kind);
  out.n_evals_build = result.n_evals;

  const StudentMixture proposal = mixture_to_student(result.mixture, df);
  RandomStream rng(mix_seed(seed, 7));
  const ImportanceSample s = importance_sample(target, proposal, n_is, rng);
  out.ness = ness(s);
  out.log_z_hat = log_estimate_Z(s);
  out.resampled = residual_resample(s, n_resample, rng);
  out.n_evals_total = target.eval_count();

  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd lam = out.resampled.col(7 + k);
    const double mean = lam.mean();
    out.lambda_mean[k] = mean;
    out.lambda_sd[k] = std::sqrt((lam.array() - mean).square().sum() /
                                 static_cast<double>(lam.size()));
  }
  return out;
}

nlohmann::json enso_report_to_json(const EnsoReport& r) {
  return nlohmann::json{
      {"n_components", r.n_components},
      {"stop_reason", r.stop_reason},
      {"n_evals_build", r.n_evals_build},
      {"n_evals_total", r.n_evals_total},
      {"ness", r.ness},
      {"log_z_hat", r.log_z_hat},
      {"lambda_mean", {r.lambda_mean[0], r.lambda_mean[1], r.lambda_mean[2]}},
      {"lambda_sd", {r.lambda_sd[0], r.lambda_sd[1], r.lambda_sd[2]}}};
}

}  // namespace iterlap
