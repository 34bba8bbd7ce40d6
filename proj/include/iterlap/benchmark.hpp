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

#include "iterlap/iterlap.hpp"
#include "iterlap/montecarlo.hpp"

#include <json.hpp>

#include <string>

namespace iterlap {

enum class BenchCase { F1, F2, F3, Illustration1d };
enum class ApproxMethod { Laplace, IterLap };
enum class ReportFormat { Json, Csv, Table };

BenchCase bench_case_from_string(const std::string& name);
ApproxMethod method_from_string(const std::string& name);
ReportFormat format_from_string(const std::string& name);
std::string to_string(BenchCase c);
std::string to_string(ApproxMethod m);

/// Builds the named test density. Every case starts the optimization from
/// the origin.
TargetDensity make_bench_target(BenchCase c);

struct ReferenceMoments {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

/// Analytic marginal moments of the test densities.
ReferenceMoments reference_moments(BenchCase c);

struct BenchmarkReport {
  std::string case_name;
  std::string method;
  int reps = 0;
  int n_samples = 0;
  std::uint64_t seed = 0;
  double ness_mean = 0.0;
  double ness_sd = 0.0;
  Eigen::VectorXd mean_err;  // |mean_hat - mean| / sd_true, averaged over reps
  Eigen::VectorXd sd_err;    // |sd_hat - sd| / sd_true, averaged over reps
  int n_components = 0;
  long long n_evals = 0;     // build phase only
  std::string stop_reason;
};

/// Builds the approximation once and repeats importance sampling `reps`
/// times with per-repetition seeds derived from `seed`.
BenchmarkReport run_benchmark(BenchCase c, ApproxMethod method, int reps, int n_samples,
                              std::uint64_t seed, const IterLapConfig* config = nullptr);

nlohmann::json report_to_json(const BenchmarkReport& r);
std::string emit_report(const BenchmarkReport& r, ReportFormat format);

struct EnsoReport {
  int n_components = 0;
  std::string stop_reason;
  long long n_evals_build = 0;
  long long n_evals_total = 0;
  double ness = 0.0;
  double log_z_hat = 0.0;
  Eigen::Vector3d lambda_mean;
  Eigen::Vector3d lambda_sd;
  Eigen::MatrixXd resampled;  // n_resample x 11 unweighted draws
};

/// Full pressure-regression pipeline: iterated Laplace approximation from
/// the least-squares start, t-mixture proposal, importance sampling and
/// residual resampling; reports the posterior period summaries.
EnsoReport run_enso(const std::string& data_path, const std::string& start_path,
                    std::uint64_t seed, int n_is = 5000, int n_resample = 5000, double df = 10.0,
                    const IterLapConfig* config = nullptr);

nlohmann::json enso_report_to_json(const EnsoReport& r);

/// Single-mode Laplace approximation (the iterLap starting point) as a
/// one-component mixture with the analytic Laplace mass.
Mixture laplace_single_mode(const TargetDensity& target, const Eigen::VectorXd& start,
                            const OptimConfig& optim = {});

}  // namespace iterlap
