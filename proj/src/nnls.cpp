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

#include "iterlap/nnls.hpp"

#include <cmath>
#include <stdexcept>

namespace iterlap {

namespace {

// Least-squares solve restricted to the passive columns.
Eigen::VectorXd passive_solve(const Eigen::MatrixXd& F, const Eigen::VectorXd& y,
                              const std::vector<int>& passive) {
  Eigen::MatrixXd sub(F.rows(), passive.size());
  for (std::size_t i = 0; i < passive.size(); ++i) sub.col(i) = F.col(passive[i]);
  return sub.colPivHouseholderQr().solve(y);
}

}  // namespace

NnlsSolution solve_nnls(const NnlsProblem& problem) {
  const Eigen::MatrixXd& F0 = problem.F;
  const Eigen::VectorXd& y = problem.y;
  if (F0.rows() != y.size()) throw std::invalid_argument("solve_nnls: F rows must match y length");
  if (F0.size() == 0 || y.size() == 0) throw std::invalid_argument("solve_nnls: empty problem");
  if (!F0.allFinite() || !y.allFinite())
    throw std::invalid_argument("solve_nnls: non-finite entries");

  const int J = static_cast<int>(F0.cols());

  // Unit-norm column scaling; all-zero columns are dropped with w = 0.
  Eigen::VectorXd col_norm(J);
  std::vector<bool> usable(J, true);
  Eigen::MatrixXd F = F0;
  for (int j = 0; j < J; ++j) {
    col_norm[j] = F0.col(j).norm();
    if (col_norm[j] > 0.0) {
      F.col(j) /= col_norm[j];
    } else {
      usable[j] = false;
    }
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(J);  // scaled-problem weights
  std::vector<bool> in_passive(J, false);
  std::vector<bool> blocked(J, false);  // made no progress since the last real step
  std::vector<int> passive;
  Eigen::VectorXd resid = y;

  NnlsSolution sol;
  const int max_outer = 3 * J;
  const double enter_tol = 1e-10 * (F.transpose() * y).lpNorm<Eigen::Infinity>();

  while (true) {
    // Dual vector on the zero set; the most positive entry enters the
    // passive set (ties broken toward the lowest index).
    const Eigen::VectorXd dual = F.transpose() * resid;
    int enter = -1;
    double best = enter_tol;
    for (int j = 0; j < J; ++j) {
      if (in_passive[j] || blocked[j] || !usable[j]) continue;
      if (dual[j] > best) {
        best = dual[j];
        enter = j;
      }
    }
    if (enter < 0) break;
    if (sol.iterations >= max_outer)
      throw std::runtime_error("solve_nnls: iteration cap exceeded");
    ++sol.iterations;

    in_passive[enter] = true;
    passive.push_back(enter);

    bool progressed = false;
    for (;;) {
      const Eigen::VectorXd z = passive_solve(F, y, passive);

      // A freshly entered column whose trial weight is non-positive cannot
      // make progress; block it until another step changes the residual.
      if (!progressed && z[z.size() - 1] <= 0.0 &&
          passive.back() == enter) {
        passive.pop_back();
        in_passive[enter] = false;
        blocked[enter] = true;
        break;
      }

      bool all_positive = true;
      for (Eigen::Index i = 0; i < z.size(); ++i)
        if (z[i] <= 0.0) all_positive = false;
      if (all_positive) {
        for (std::size_t i = 0; i < passive.size(); ++i) w[passive[i]] = z[i];
        progressed = true;
        break;
      }

      // Step toward z until the first passive weight hits zero.
      double alpha = 1.0;
      for (std::size_t i = 0; i < passive.size(); ++i) {
        if (z[i] <= 0.0) {
          const double wi = w[passive[i]];
          alpha = std::min(alpha, wi / (wi - z[i]));
        }
      }
      for (std::size_t i = 0; i < passive.size(); ++i) {
        const int j = passive[i];
        w[j] += alpha * (z[i] - w[j]);
      }
      progressed = progressed || alpha > 0.0;
      std::vector<int> still;
      for (int j : passive) {
        if (w[j] > 1e-14) {
          still.push_back(j);
        } else {
          w[j] = 0.0;
          in_passive[j] = false;
        }
      }
      passive = std::move(still);
      if (passive.empty()) break;
    }

    if (progressed) {
      resid = y - F * w;
      std::fill(blocked.begin(), blocked.end(), false);
    }
  }

  sol.w = w;
  for (int j = 0; j < J; ++j)
    if (col_norm[j] > 0.0) sol.w[j] /= col_norm[j];
  const Eigen::VectorXd final_resid = y - F0 * sol.w;
  sol.rss = final_resid.squaredNorm();
  for (int j = 0; j < J; ++j)
    if (sol.w[j] == 0.0) sol.active.push_back(j);
  return sol;
}

}  // namespace iterlap
