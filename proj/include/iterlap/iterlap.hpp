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
#include "iterlap/optimize.hpp"
#include "iterlap/quasirandom.hpp"
#include "iterlap/target.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iterlap {

struct IterLapConfig {
  int grid_n = 0;           // points per component; 0 means default_grid_size(p)
  double delta = 0.01;      // max-error stopping tolerance (on the rescaled scale)
  double eps = 0.005;       // relative change tolerance for the Z criterion
  int max_components = 20;  // T
  int k_starts = 3;         // starting values tried per iteration
  int n_candidates = 10;    // grid points fed to k-means
  double eps_tilde = 1e-5;  // residual smoothing constant, rescaled scale
  std::uint64_t seed = 1;
  // Looser gradient tolerance than the bare optimizer default: mode location
  // error enters the approximation quadratically, and finite-difference
  // gradients on high-dimensional residual surfaces stall near 1e-6.
  OptimConfig optim{1e-5, 1e-10, 200};
};

/// Accumulated least-squares data: grid rows, target values and the
/// component-density design matrix, all aligned by row.
struct GridState {
  Eigen::MatrixXd X;       // (n J) x p grid
  Eigen::VectorXd log_pi;  // raw log target at the grid rows
  Eigen::VectorXd y;       // exp(log_pi - logM)
  Eigen::MatrixXd F;       // (n J) x J component densities
  double logM = 0.0;       // max of log_pi over the grid

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index n_components() const { return F.cols(); }
};

enum class StopKind { MaxErrorMet, ZConverged, NoImprovementFound, MaxComponentsReached };

struct StopReason {
  StopKind kind;
  double max_error = 0.0;      // for MaxErrorMet
  double z_rel_change = 0.0;   // for ZConverged
  int failed_starts = 0;       // for NoImprovementFound
};

std::string to_string(StopKind kind);

struct IterLapResult {
  explicit IterLapResult(Mixture m) : mixture(std::move(m)) {}

  Mixture mixture;                  // weights on the rescaled scale
  double logM = 0.0;                // physical Z estimate is Z() * exp(logM)
  std::vector<double> Z_history;    // physical-scale normalization estimates
  StopReason stop_reason{StopKind::MaxErrorMet};
  long long n_evals = 0;
  std::vector<int> components_added_order;

  double log_physical_Z() const { return std::log(mixture.Z()) + logM; }
};

struct Iteration0 {
  GridState state;
  std::vector<GaussComponent> components;
  Eigen::VectorXd weights;           // NNLS refit, rescaled scale
  Eigen::VectorXd analytic_weights;  // Laplace masses, rescaled scale
  Eigen::VectorXd last_mode;
  long long n_evals = 0;
};

/// Iteration 0: Laplace fit at every located mode (deduplicated), one
/// quasi-random grid per component, NNLS weight refit.
/// Throws when no start produces a negative-definite Hessian.
Iteration0 iteration_zero(const TargetDensity& target,
                          const std::vector<Eigen::VectorXd>& starts, const IterLapConfig& cfg,
                          SobolGenerator& sobol);

/// The positive surrogate max(r, ...) used for log-scale optimization of a
/// possibly negative residual r: r itself where r >= eps_tilde, otherwise
/// exp(r - eps_tilde) * eps_tilde.
double smooth_positive(double r, double eps_tilde);

/// Rescaled-scale residual pi*(x) - mixture(x), passed through
/// smooth_positive. Always positive and finite; costs one target evaluation.
double smoothed_residual(const TargetDensity& target, const GridState& state, const Mixture& mix,
                         const Eigen::Ref<const Eigen::VectorXd>& x, double eps_tilde);

/// Ranks grid rows by log y_i - log yhat_i, clusters the top candidates with
/// k-means and orders the centers by distance to the last added mode,
/// farthest first.
std::vector<Eigen::VectorXd> select_starting_values(const GridState& state,
                                                    const Eigen::VectorXd& fitted,
                                                    const Eigen::VectorXd& last_mode,
                                                    const IterLapConfig& cfg,
                                                    std::uint64_t kmeans_seed);

/// One residual Laplace step: optimize the log smoothed residual from each
/// starting value in turn; the first negative-definite maximum becomes the
/// new component. Empty when all starts fail.
std::optional<GaussComponent> residual_laplace_step(const TargetDensity& target,
                                                    const GridState& state, const Mixture& mix,
                                                    const Eigen::VectorXd& last_mode,
                                                    const IterLapConfig& cfg,
                                                    std::uint64_t kmeans_seed,
                                                    int* failed_starts = nullptr);

/// Appends the new component's grid, evaluates the target there only, and
/// borders F with one row block and one column. Rescales y when the grid
/// maximum of log pi increases.
void extend_grid(const TargetDensity& target, GridState& state,
                 const std::vector<GaussComponent>& components, const GaussComponent& fresh,
                 const IterLapConfig& cfg, SobolGenerator& sobol);

/// NNLS fit of the component weights on the current grid. Returns the
/// weights and Z_t = sum w_j (rescaled scale).
std::pair<Eigen::VectorXd, double> fit_weights(const GridState& state);

/// Stopping rules in order: max-error, Z stabilization (needs three
/// history entries), component budget.
std::optional<StopReason> check_stop(const GridState& state, const std::vector<double>& Z_history,
                                     double max_err, const IterLapConfig& cfg, int n_components);

/// Full iterated Laplace approximation of an unnormalized density.
IterLapResult run_iterlap(const TargetDensity& target, const std::vector<Eigen::VectorXd>& starts,
                          const IterLapConfig& cfg = {});

}  // namespace iterlap
