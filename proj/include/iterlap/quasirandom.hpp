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

#include <Eigen/Dense>

#include <cstdint>

namespace iterlap {

/// Sobol sequence generator, up to 32 dimensions, natural (non-Gray) point
/// ordering. A nonzero scramble seed applies a per-dimension digital shift
/// (XOR with a seeded random word). The all-zero point at index 0 is always
/// skipped, and any scrambled point with a zero coordinate is skipped too,
/// so every emitted coordinate lies strictly inside (0,1).
class SobolGenerator {
 public:
  static constexpr int max_dim = 32;

  explicit SobolGenerator(int dim, std::uint64_t scramble_seed = 0);

  int dim() const { return dim_; }
  std::uint64_t scramble_seed() const { return scramble_seed_; }
  /// Number of points consumed so far.
  std::uint64_t index() const { return count_; }

  /// Next n points, one per row, each coordinate in (0,1).
  Eigen::MatrixXd next(Eigen::Index n);

  void skip(std::uint64_t n_points);

  /// Independent cursor into the same stream, advanced by offset points.
  SobolGenerator clone_with_offset(std::uint64_t offset) const;

 private:
  int dim_;
  std::uint64_t scramble_seed_;
  std::uint64_t next_index_;  // next raw sequence index to try
  std::uint64_t count_;
  Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic> dirs_;  // dim x 32
  Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 1> shift_;

  bool raw_point(std::uint64_t idx, double* out) const;
};

struct Grid {
  Eigen::MatrixXd points;     // n x p
  int source_component = -1;  // index of the generating mixture component
};

/// Quasi-random sample of N(mu, Sigma): rows are mu + L * Phi^{-1}(u) for
/// Sobol points u.
Grid gaussian_grid(const GaussComponent& c, Eigen::Index n, SobolGenerator& gen,
                   int source_component = -1);

/// ceil(50 p^1.25) grid points per component.
int default_grid_size(int p);

}  // namespace iterlap
