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

#include <vector>

namespace iterlap {

struct NnlsProblem {
  Eigen::MatrixXd F;  // m x J design matrix
  Eigen::VectorXd y;  // m observations
};

struct NnlsSolution {
  Eigen::VectorXd w;          // J, element-wise >= 0
  double rss = 0.0;           // ||y - F w||^2
  std::vector<int> active;    // indices held at zero
  int iterations = 0;
};

/// Global minimizer of ||y - F w||^2 subject to w >= 0, by the Lawson-Hanson
/// active-set iteration on unit-norm-scaled columns. All-zero columns are
/// dropped up front and reported with w = 0.
NnlsSolution solve_nnls(const NnlsProblem& problem);

}  // namespace iterlap
