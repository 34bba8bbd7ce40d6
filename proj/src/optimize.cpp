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

#include "iterlap/optimize.hpp"

#include "iterlap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace iterlap {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double grad_step(double xi) {
  static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  return h0 * (1.0 + std::fabs(xi));
}

double hess_step(double xi) {
  static const double h0 = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  return h0 * (1.0 + std::fabs(xi));
}

// Counting wrapper that maps NaN to -inf so the search can reject the point.
struct SafeObjective {
  const Objective& f;
  int n_evals = 0;
  bool saw_nan = false;

  double operator()(const Eigen::VectorXd& x) {
    ++n_evals;
    const double v = f(x);
    if (std::isnan(v)) {
      saw_nan = true;
      return neg_inf;
    }
    return v;
  }
};

// Nelder-Mead on -f, started around x. Used when curvature information is
// too unreliable for the quasi-Newton line search.
void nelder_mead(SafeObjective& f, Eigen::VectorXd& x, double& fx, int budget) {
  const Eigen::Index p = x.size();
  const Eigen::Index m = p + 1;
  Eigen::MatrixXd simplex(m, p);
  Eigen::VectorXd values(m);
  simplex.row(0) = x.transpose();
  values[0] = fx;
  for (Eigen::Index i = 0; i < p; ++i) {
    Eigen::VectorXd v = x;
    v[i] += 0.05 * (1.0 + std::fabs(v[i]));
    simplex.row(i + 1) = v.transpose();
    values[i + 1] = f(v);
  }
  std::vector<Eigen::Index> order(m);
  for (int it = 0; it < budget; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });
    const Eigen::Index best = order[0], worst = order[m - 1], second_worst = order[m - 2];
    if (std::isfinite(values[best]) && std::isfinite(values[worst]) &&
        values[best] - values[worst] < 1e-12 * (1.0 + std::fabs(values[best])))
      break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i = 0; i < m; ++i)
      if (i != worst) centroid += simplex.row(i).transpose();
    centroid /= static_cast<double>(p);

    const Eigen::VectorXd xw = simplex.row(worst).transpose();
    Eigen::VectorXd xr = centroid + (centroid - xw);
    const double fr = f(xr);
    if (fr > values[best]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - xw);
      const double fe = f(xe);
      if (fe > fr) {
        simplex.row(worst) = xe.transpose();
        values[worst] = fe;
      } else {
        simplex.row(worst) = xr.transpose();
        values[worst] = fr;
      }
    } else if (fr > values[second_worst]) {
      simplex.row(worst) = xr.transpose();
      values[worst] = fr;
    } else {
      Eigen::VectorXd xc = centroid - 0.5 * (centroid - xw);
      const double fc = f(xc);
      if (fc > values[worst]) {
        simplex.row(worst) = xc.transpose();
        values[worst] = fc;
      } else {
        for (Eigen::Index i = 0; i < m; ++i) {
          if (i == best) continue;
          simplex.row(i) =
              (simplex.row(best) + 0.5 * (simplex.row(i) - simplex.row(best))).eval();
          values[i] = f(simplex.row(i).transpose());
        }
      }
    }
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < m; ++i)
    if (values[i] > values[best]) best = i;
  x = simplex.row(best).transpose();
  fx = values[best];
}

bool finite_gradient(SafeObjective& f, const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  const Eigen::Index p = x.size();
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double h = grad_step(x[i]);
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fp = f(xp), fm = f(xm);
    xp[i] = x[i];
    xm[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) return false;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return true;
}

}  // namespace

Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x) {
  const Eigen::Index p = x.size();
  Eigen::VectorXd g(p);
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double h = grad_step(x[i]);
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fp = f(xp), fm = f(xm);
    xp[i] = x[i];
    xm[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("numerical_gradient: non-finite objective at stencil, coordinate " +
                               std::to_string(i));
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

HessianResult numerical_hessian(const Objective& f, const Eigen::VectorXd& x) {
  const Eigen::Index p = x.size();
  const double f0 = f(x);
  if (!std::isfinite(f0)) throw std::runtime_error("numerical_hessian: non-finite objective at x");

  auto eval = [&](const Eigen::VectorXd& xx, Eigen::Index i, Eigen::Index j) {
    const double v = f(xx);
    if (!std::isfinite(v))
      throw std::runtime_error("numerical_hessian: non-finite objective at stencil (" +
                               std::to_string(i) + "," + std::to_string(j) + ")");
    return v;
  };

  HessianResult res;
  res.H.resize(p, p);
  Eigen::VectorXd xx = x;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double hi = hess_step(x[i]);
    xx[i] = x[i] + hi;
    const double fp = eval(xx, i, i);
    xx[i] = x[i] - hi;
    const double fm = eval(xx, i, i);
    xx[i] = x[i];
    res.H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    const double hi = hess_step(x[i]);
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double hj = hess_step(x[j]);
      xx[i] = x[i] + hi;
      xx[j] = x[j] + hj;
      const double fpp = eval(xx, i, j);
      xx[j] = x[j] - hj;
      const double fpm = eval(xx, i, j);
      xx[i] = x[i] - hi;
      const double fmm = eval(xx, i, j);
      xx[j] = x[j] + hj;
      const double fmp = eval(xx, i, j);
      xx[i] = x[i];
      xx[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
      res.H(i, j) = v;
      res.H(j, i) = v;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(-res.H);
  if (llt.info() == Eigen::Success) {
    res.neg_definite = true;
    res.neg_inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
  }
  return res;
}

OptimResult maximize(const Objective& f, Eigen::VectorXd start, const OptimConfig& cfg) {
  SafeObjective obj{f};
  OptimResult res;
  res.argmax = start;
  res.value = obj(start);
  res.grad_norm = std::numeric_limits<double>::infinity();
  if (!std::isfinite(res.value)) {
    res.n_evals = obj.n_evals;
    return res;
  }

  const Eigen::Index p = start.size();
  Eigen::VectorXd x = start;
  double fx = res.value;
  Eigen::VectorXd g(p), g_new(p);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(p, p);

  auto grad_tol = [&](double value) { return cfg.gtol * std::max(1.0, std::fabs(value)); };

  if (!finite_gradient(obj, x, g)) {
    res.n_evals = obj.n_evals;
    return res;
  }

  int ls_failures = 0;
  bool used_fallback = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (res.grad_norm <= grad_tol(fx)) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd d = hinv * g;
    if (d.dot(g) <= 1e-12 * d.norm() * g.norm()) {
      hinv.setIdentity();
      d = g;
    }

    // Backtracking Armijo line search.
    const double slope = g.dot(d);
    double t = 1.0;
    double f_trial = neg_inf;
    Eigen::VectorXd x_trial;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      x_trial = x + t * d;
      f_trial = obj(x_trial);
      if (std::isfinite(f_trial) && f_trial >= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }

    // Greedy expansion: when the full step was accepted outright, keep
    // doubling while the objective still improves. Without it the search
    // crawls through regions where the log-residual is convex (far from the
    // next mode) because the quasi-Newton model carries no usable curvature.
    if (accepted && t == 1.0) {
      for (int ex = 0; ex < 24; ++ex) {
        const Eigen::VectorXd x_next = x + 2.0 * t * d;
        const double f_next = obj(x_next);
        if (!std::isfinite(f_next) || f_next <= f_trial) break;
        t *= 2.0;
        x_trial = x_next;
        f_trial = f_next;
      }
    }

    if (!accepted) {
      ++ls_failures;
      if (ls_failures >= 2 && !used_fallback) {
        used_fallback = true;
        nelder_mead(obj, x, fx, cfg.max_iter * (static_cast<int>(p) + 1));
        hinv.setIdentity();
        if (!finite_gradient(obj, x, g)) break;
        ls_failures = 0;
        continue;
      }
      if (ls_failures >= 2) break;  // fallback already spent
      hinv.setIdentity();
      continue;
    }
    ls_failures = 0;

    if (!finite_gradient(obj, x_trial, g_new)) {
      x = x_trial;
      fx = f_trial;
      g.setConstant(std::numeric_limits<double>::infinity());
      break;
    }

    const Eigen::VectorXd s = x_trial - x;
    const Eigen::VectorXd yv = g_new - g;  // note: ascent; curvature sy < 0 is skipped
    const double sy = s.dot(yv);
    if (sy < -1e-12) {
      // BFGS update of the inverse Hessian of -f (positive curvature in the
      // minimization sense).
      const double rho = 1.0 / (-sy);
      const Eigen::MatrixXd outer = s * (-yv).transpose() * rho;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
      hinv = (eye - outer) * hinv * (eye - outer.transpose()) + rho * s * s.transpose();
    }

    const double step_norm = s.lpNorm<Eigen::Infinity>();
    x = x_trial;
    fx = f_trial;
    g = g_new;
    if (step_norm <= cfg.xtol * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      res.grad_norm = g.lpNorm<Eigen::Infinity>();
      res.converged = res.grad_norm <= grad_tol(fx);
      break;
    }
  }

  if (!res.converged) {
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    res.converged = res.grad_norm <= grad_tol(fx);
  }
  res.argmax = x;
  res.value = fx;
  res.n_evals = obj.n_evals;
  return res;
}

namespace {

KMeansResult kmeans_single(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
  const Eigen::Index m = points.rows();
  const Eigen::Index p = points.cols();

  RandomStream rng(seed);
  Eigen::MatrixXd centers(k, p);

  // k-means++ seeding.
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.uniform() * m));
  Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick;
    if (total <= 0.0) {
      pick = static_cast<Eigen::Index>(rng.uniform() * m);
    } else {
      pick = rng.categorical(d2);
    }
    centers.row(c) = points.row(pick);
    d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  KMeansResult res;
  std::vector<int> assign(m, -1), prev(m, -2);
  for (int pass = 0; pass < 100; ++pass) {
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[i] = best;
      wcss += best_d;
    }
    res.wcss_history.push_back(wcss);
    if (assign == prev) break;
    prev = assign;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, p);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < m; ++i) {
      sums.row(assign[i]) += points.row(i);
      counts[assign[i]] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0.0) {
        centers.row(c) = sums.row(c) / counts[c];
      }
      // empty clusters keep their previous center
    }
  }

  // Collapse exactly-coincident centers; fewer than k signals degeneracy.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < k; ++c) {
    bool dup = false;
    for (Eigen::Index other : keep)
      if ((centers.row(c) - centers.row(other)).norm() == 0.0) dup = true;
    if (!dup) keep.push_back(c);
  }
  if (static_cast<int>(keep.size()) < k) {
    res.degenerate = true;
    Eigen::MatrixXd distinct(keep.size(), p);
    for (std::size_t i = 0; i < keep.size(); ++i) distinct.row(i) = centers.row(keep[i]);
    res.centers = distinct;
  } else {
    res.centers = centers;
  }
  return res;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
  if (k < 1 || points.rows() < k) throw std::invalid_argument("kmeans: need m >= k >= 1");
  // Several seeded restarts; a single unlucky seeding can blend unrelated
  // groups, which matters when the centers are used as optimizer starts.
  constexpr int n_restarts = 8;
  KMeansResult best;
  for (int r = 0; r < n_restarts; ++r) {
    KMeansResult cand = kmeans_single(points, k, mix_seed(seed, r));
    if (r == 0 || cand.wcss_history.back() < best.wcss_history.back()) best = std::move(cand);
  }
  return best;
}

}  // namespace iterlap
