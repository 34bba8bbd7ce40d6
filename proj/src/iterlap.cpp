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

#include "iterlap/iterlap.hpp"

#include "iterlap/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace iterlap {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// exp with the argument capped so the result stays finite.
double safe_exp(double a) { return std::exp(std::min(a, 700.0)); }

// log of smooth_positive(r), finite for every finite r.
double log_smooth_positive(double r, double eps_tilde) {
  if (r >= eps_tilde) return std::log(r);
  return (r - eps_tilde) + std::log(eps_tilde);
}

// Rescaled residual at x; one target evaluation.
double rescaled_residual(const TargetDensity& target, const GridState& state, const Mixture& mix,
                         const Eigen::VectorXd& x) {
  const double target_val = safe_exp(target.log_density(x) - state.logM);
  const double mix_val = safe_exp(mixture_logpdf(mix, x));
  return target_val - mix_val;
}

Eigen::VectorXd component_column(const GaussComponent& c, const Eigen::MatrixXd& X) {
  Eigen::VectorXd col(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    col[i] = std::exp(component_logpdf(c, X.row(i).transpose()));
  return col;
}

bool is_duplicate_mode(const Eigen::VectorXd& candidate,
                       const std::vector<GaussComponent>& components) {
  for (const auto& c : components)
    if ((candidate - c.mean()).norm() < 1e-4 * (1.0 + c.mean().norm())) return true;
  return false;
}

}  // namespace

std::string to_string(StopKind kind) {
  switch (kind) {
    case StopKind::MaxErrorMet: return "MaxErrorMet";
    case StopKind::ZConverged: return "ZConverged";
    case StopKind::NoImprovementFound: return "NoImprovementFound";
    case StopKind::MaxComponentsReached: return "MaxComponentsReached";
  }
  return "unknown";
}

double smooth_positive(double r, double eps_tilde) {
  if (r >= eps_tilde) return r;
  return std::exp(r - eps_tilde) * eps_tilde;
}

double smoothed_residual(const TargetDensity& target, const GridState& state, const Mixture& mix,
                         const Eigen::Ref<const Eigen::VectorXd>& x, double eps_tilde) {
  return smooth_positive(rescaled_residual(target, state, mix, x), eps_tilde);
}

Iteration0 iteration_zero(const TargetDensity& target, const std::vector<Eigen::VectorXd>& starts,
                          const IterLapConfig& cfg, SobolGenerator& sobol) {
  if (starts.empty()) throw std::invalid_argument("iteration_zero: no starting values");
  const Eigen::Index p = target.dim();
  const long long evals_before = target.eval_count();
  const auto log_pi_fn = [&target](const Eigen::VectorXd& x) { return target.log_density(x); };

  Iteration0 out;
  std::vector<double> mode_log_pi;
  for (const auto& start : starts) {
    if (start.size() != p) throw std::invalid_argument("iteration_zero: start dimension mismatch");
    const OptimResult opt = maximize(log_pi_fn, start, cfg.optim);
    if (!opt.converged) continue;
    if (is_duplicate_mode(opt.argmax, out.components)) continue;
    try {
      const HessianResult hess = numerical_hessian(log_pi_fn, opt.argmax);
      if (!hess.neg_definite) continue;
      out.components.emplace_back(opt.argmax, *hess.neg_inv);
      mode_log_pi.push_back(opt.value);
    } catch (const std::exception&) {
      continue;  // non-finite stencil or a factorization failure rejects the start
    }
  }
  if (out.components.empty())
    throw std::runtime_error("iterLap: no initial mode (no start led to a negative definite "
                             "Hessian)");

  const int J = static_cast<int>(out.components.size());
  const int n = cfg.grid_n > 0 ? cfg.grid_n : default_grid_size(static_cast<int>(p));

  GridState state;
  state.X.resize(static_cast<Eigen::Index>(n) * J, p);
  for (int j = 0; j < J; ++j) {
    const Grid grid = gaussian_grid(out.components[j], n, sobol, j);
    state.X.middleRows(static_cast<Eigen::Index>(n) * j, n) = grid.points;
  }

  state.log_pi.resize(state.X.rows());
  for (Eigen::Index i = 0; i < state.X.rows(); ++i)
    state.log_pi[i] = target.log_density(state.X.row(i).transpose());
  state.logM = state.log_pi.maxCoeff();
  if (!std::isfinite(state.logM))
    throw std::runtime_error("iterLap: target is zero on the whole initial grid");
  state.y = (state.log_pi.array() - state.logM).exp();

  state.F.resize(state.X.rows(), J);
  for (int j = 0; j < J; ++j) state.F.col(j) = component_column(out.components[j], state.X);

  const NnlsSolution fit = solve_nnls({state.F, state.y});
  out.weights = fit.w;

  out.analytic_weights.resize(J);
  for (int j = 0; j < J; ++j)
    out.analytic_weights[j] =
        std::exp(log_laplace_weight(out.components[j], mode_log_pi[j] - state.logM));

  out.last_mode = out.components.back().mean();
  out.state = std::move(state);
  out.n_evals = target.eval_count() - evals_before;
  return out;
}

std::vector<Eigen::VectorXd> select_starting_values(const GridState& state,
                                                    const Eigen::VectorXd& fitted,
                                                    const Eigen::VectorXd& last_mode,
                                                    const IterLapConfig& cfg,
                                                    std::uint64_t kmeans_seed) {
  const Eigen::Index m = state.rows();
  if (m == 0) throw std::invalid_argument("select_starting_values: empty grid");

  // log-scale ratio log y_i - log yhat_i; the fitted value is floored to
  // keep the ordering defined when yhat underflows.
  constexpr double log_floor = -745.0;
  std::vector<Eigen::Index> order;
  order.reserve(m);
  Eigen::VectorXd ratio(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double log_y = state.log_pi[i] - state.logM;
    if (!std::isfinite(log_y)) {
      ratio[i] = neg_inf;
      continue;
    }
    const double log_fit = fitted[i] > 0.0 ? std::max(std::log(fitted[i]), log_floor) : log_floor;
    ratio[i] = log_y - log_fit;
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ratio[a] > ratio[b]; });

  const int n_cand = static_cast<int>(std::min<Eigen::Index>(cfg.n_candidates, order.size()));
  if (n_cand == 0) return {};
  Eigen::MatrixXd candidates(n_cand, state.X.cols());
  for (int i = 0; i < n_cand; ++i) candidates.row(i) = state.X.row(order[i]);

  const int k = std::min(cfg.k_starts, n_cand);
  const KMeansResult km = kmeans(candidates, k, kmeans_seed);

  std::vector<Eigen::Index> center_order(km.centers.rows());
  std::iota(center_order.begin(), center_order.end(), 0);
  Eigen::VectorXd dist(km.centers.rows());
  for (Eigen::Index c = 0; c < km.centers.rows(); ++c)
    dist[c] = (km.centers.row(c).transpose() - last_mode).norm();
  std::stable_sort(center_order.begin(), center_order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return dist[a] > dist[b]; });

  std::vector<Eigen::VectorXd> result;
  result.reserve(center_order.size());
  for (Eigen::Index c : center_order) result.push_back(km.centers.row(c).transpose());
  return result;
}

std::optional<GaussComponent> residual_laplace_step(const TargetDensity& target,
                                                    const GridState& state, const Mixture& mix,
                                                    const Eigen::VectorXd& last_mode,
                                                    const IterLapConfig& cfg,
                                                    std::uint64_t kmeans_seed, int* failed_starts) {
  const Eigen::VectorXd fitted = state.F * mix.weights();
  const std::vector<Eigen::VectorXd> starts =
      select_starting_values(state, fitted, last_mode, cfg, kmeans_seed);

  const auto objective = [&](const Eigen::VectorXd& x) {
    return log_smooth_positive(rescaled_residual(target, state, mix, x), cfg.eps_tilde);
  };

  int failed = 0;
  std::optional<GaussComponent> found;
  for (const auto& start : starts) {
    const OptimResult opt = maximize(objective, start, cfg.optim);
    if (!opt.converged) {
      ++failed;
      continue;
    }
    // A maximum still inside the smoothing region means the residual never
    // exceeded eps_tilde along this search; the curvature there is noise,
    // not a mode.
    if (opt.value <= std::log(cfg.eps_tilde)) {
      ++failed;
      continue;
    }
    try {
      const HessianResult hess = numerical_hessian(objective, opt.argmax);
      if (!hess.neg_definite) {
        ++failed;
        continue;
      }
      found.emplace(opt.argmax, *hess.neg_inv);
      break;
    } catch (const std::exception&) {
      ++failed;
      continue;
    }
  }
  if (failed_starts) *failed_starts = failed;
  return found;
}

void extend_grid(const TargetDensity& target, GridState& state,
                 const std::vector<GaussComponent>& components, const GaussComponent& fresh,
                 const IterLapConfig& cfg, SobolGenerator& sobol) {
  const Eigen::Index p = state.X.cols();
  const int n = cfg.grid_n > 0 ? cfg.grid_n : default_grid_size(static_cast<int>(p));
  const Eigen::Index old_rows = state.rows();
  const Eigen::Index old_cols = state.n_components();

  const Grid grid = gaussian_grid(fresh, n, sobol, static_cast<int>(old_cols));
  state.X.conservativeResize(old_rows + n, p);
  state.X.bottomRows(n) = grid.points;

  state.log_pi.conservativeResize(old_rows + n);
  for (Eigen::Index i = 0; i < n; ++i)
    state.log_pi[old_rows + i] = target.log_density(grid.points.row(i).transpose());

  const double new_max = state.log_pi.tail(n).maxCoeff();
  if (new_max > state.logM) {
    state.logM = new_max;
    state.y = (state.log_pi.array() - state.logM).exp();
  } else {
    state.y.conservativeResize(old_rows + n);
    state.y.tail(n) = (state.log_pi.tail(n).array() - state.logM).exp();
  }

  state.F.conservativeResize(old_rows + n, old_cols + 1);
  for (Eigen::Index j = 0; j < old_cols; ++j)
    state.F.col(j).tail(n) = component_column(components[j], grid.points);
  state.F.col(old_cols) = component_column(fresh, state.X);
}

std::pair<Eigen::VectorXd, double> fit_weights(const GridState& state) {
  const NnlsSolution fit = solve_nnls({state.F, state.y});
  return {fit.w, fit.w.sum()};
}

std::optional<StopReason> check_stop(const GridState& state, const std::vector<double>& Z_history,
                                     double max_err, const IterLapConfig& cfg, int n_components) {
  (void)state;
  if (max_err < cfg.delta) {
    StopReason r{StopKind::MaxErrorMet};
    r.max_error = max_err;
    return r;
  }
  if (Z_history.size() >= 3) {
    const double zt = Z_history[Z_history.size() - 1];
    const double zm1 = Z_history[Z_history.size() - 2];
    const double zm2 = Z_history[Z_history.size() - 3];
    const double rel = std::fabs(zt - 0.5 * (zm1 + zm2)) / zt;
    if (rel < cfg.eps) {
      StopReason r{StopKind::ZConverged};
      r.z_rel_change = rel;
      return r;
    }
  }
  if (n_components >= cfg.max_components) {
    return StopReason{StopKind::MaxComponentsReached};
  }
  return std::nullopt;
}

IterLapResult run_iterlap(const TargetDensity& target, const std::vector<Eigen::VectorXd>& starts,
                          const IterLapConfig& cfg) {
  if (!(cfg.delta > 0.0) || !(cfg.eps > 0.0) || !(cfg.eps_tilde > 0.0) ||
      cfg.max_components < 1 || cfg.k_starts < 1 || cfg.n_candidates < 1)
    throw std::invalid_argument("run_iterlap: invalid configuration");

  const long long evals_before = target.eval_count();
  SobolGenerator sobol(static_cast<int>(target.dim()), mix_seed(cfg.seed, 0));

  Iteration0 it0 = iteration_zero(target, starts, cfg, sobol);
  GridState state = std::move(it0.state);
  std::vector<GaussComponent> components = std::move(it0.components);
  Eigen::VectorXd weights = it0.weights;
  Eigen::VectorXd last_mode = it0.last_mode;

  Mixture mix(weights, components);
  std::vector<double> Z_history{weights.sum() * std::exp(state.logM)};
  double max_err = (state.y - state.F * weights).cwiseAbs().maxCoeff();

  std::vector<int> added_order(components.size());
  std::iota(added_order.begin(), added_order.end(), 0);

  StopReason stop{StopKind::MaxComponentsReached};
  for (std::uint64_t t = 1;; ++t) {
    if (auto reason = check_stop(state, Z_history, max_err, cfg,
                                 static_cast<int>(components.size()))) {
      stop = *reason;
      break;
    }

    int failed_starts = 0;
    std::optional<GaussComponent> fresh = residual_laplace_step(
        target, state, mix, last_mode, cfg, mix_seed(cfg.seed, t), &failed_starts);
    if (!fresh) {
      stop = StopReason{StopKind::NoImprovementFound};
      stop.failed_starts = failed_starts;
      break;
    }

    extend_grid(target, state, components, *fresh, cfg, sobol);
    components.push_back(std::move(*fresh));
    last_mode = components.back().mean();
    added_order.push_back(static_cast<int>(components.size()) - 1);

    auto [w, z_rescaled] = fit_weights(state);
    weights = std::move(w);
    if (!(weights.maxCoeff() > 0.0))
      throw std::runtime_error("run_iterlap: weight fit degenerated to zero");
    mix = Mixture(weights, components);
    Z_history.push_back(z_rescaled * std::exp(state.logM));
    max_err = (state.y - state.F * weights).cwiseAbs().maxCoeff();
  }

  IterLapResult result{std::move(mix)};
  result.logM = state.logM;
  result.Z_history = std::move(Z_history);
  result.stop_reason = stop;
  result.n_evals = target.eval_count() - evals_before;
  result.components_added_order = std::move(added_order);
  return result;
}

}  // namespace iterlap
