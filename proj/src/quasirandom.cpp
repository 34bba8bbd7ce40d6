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

#include "iterlap/quasirandom.hpp"

#include "iterlap/special.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace iterlap {

namespace {

constexpr int n_bits = 32;

// Primitive polynomial (degree s, interior coefficients a) and initial
// direction integers m_1..m_s per dimension, Joe-Kuo style tables.
// Dimension 1 is the van der Corput sequence and needs no entry.
struct DirSpec {
  int s;
  std::uint32_t a;
  std::uint32_t m[7];
};

constexpr DirSpec dir_table[SobolGenerator::max_dim - 1] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
    {7, 7, {1, 1, 3, 13, 7, 35, 63}},
    {7, 8, {1, 3, 5, 9, 1, 25, 53}},
    {7, 14, {1, 3, 1, 13, 9, 35, 107}},
    {7, 19, {1, 3, 1, 5, 27, 61, 29}},
    {7, 21, {1, 1, 5, 11, 19, 41, 43}},
    {7, 28, {1, 3, 5, 3, 3, 59, 3}},
    {7, 31, {1, 3, 7, 9, 5, 63, 53}},
    {7, 32, {1, 3, 5, 13, 31, 7, 37}},
    {7, 37, {1, 3, 1, 9, 9, 57, 49}},
    {7, 41, {1, 1, 3, 7, 23, 29, 89}},
    {7, 42, {1, 3, 1, 3, 19, 41, 43}},
};

}  // namespace

SobolGenerator::SobolGenerator(int dim, std::uint64_t scramble_seed)
    : dim_(dim), scramble_seed_(scramble_seed), next_index_(1), count_(0) {
  if (dim < 1 || dim > max_dim)
    throw std::invalid_argument("SobolGenerator: dimension must be in [1,32]");
  dirs_.resize(dim, n_bits);

  // Dimension 1: v_k = 2^{-k}.
  for (int k = 0; k < n_bits; ++k) dirs_(0, k) = 1u << (n_bits - 1 - k);

  for (int d = 1; d < dim; ++d) {
    const DirSpec& spec = dir_table[d - 1];
    const int s = spec.s;
    if (spec.a >= (1u << (s - 1)))
      throw std::logic_error("SobolGenerator: invalid polynomial encoding in direction table");
    std::uint32_t m[n_bits];
    for (int k = 0; k < s; ++k) {
      m[k] = spec.m[k];
      if (m[k] % 2 == 0 || m[k] >= (1u << (k + 1)))
        throw std::logic_error("SobolGenerator: invalid direction integer in table");
    }
    for (int k = s; k < n_bits; ++k) {
      std::uint32_t v = m[k - s] ^ (m[k - s] << s);
      for (int i = 1; i < s; ++i)
        if ((spec.a >> (s - 1 - i)) & 1u) v ^= m[k - i] << i;
      m[k] = v;
    }
    for (int k = 0; k < n_bits; ++k) dirs_(d, k) = m[k] << (n_bits - 1 - k);
  }

  shift_.setZero(dim);
  if (scramble_seed != 0) {
    std::mt19937_64 seeder(scramble_seed);
    for (int d = 0; d < dim; ++d) shift_[d] = static_cast<std::uint32_t>(seeder() >> 32);
  }
}

bool SobolGenerator::raw_point(std::uint64_t idx, double* out) const {
  const std::uint64_t gray = idx ^ (idx >> 1);  // classic Gray-code ordering
  for (int d = 0; d < dim_; ++d) {
    std::uint32_t x = 0;
    std::uint64_t n = gray;
    int bit = 0;
    while (n) {
      if (n & 1ULL) x ^= dirs_(d, bit);
      n >>= 1;
      ++bit;
    }
    x ^= shift_[d];
    if (x == 0) return false;  // on a scrambled stream one index per dim hits zero
    out[d] = static_cast<double>(x) * 0x1.0p-32;
  }
  return true;
}

Eigen::MatrixXd SobolGenerator::next(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("SobolGenerator::next: n must be >= 1");
  Eigen::MatrixXd pts(n, dim_);
  Eigen::Index got = 0;
  std::vector<double> row(dim_);
  while (got < n) {
    if (raw_point(next_index_, row.data())) {
      for (int d = 0; d < dim_; ++d) pts(got, d) = row[d];
      ++got;
      ++count_;
    }
    ++next_index_;
  }
  return pts;
}

void SobolGenerator::skip(std::uint64_t n_points) {
  std::vector<double> row(dim_);
  for (std::uint64_t i = 0; i < n_points; ++i) {
    while (!raw_point(next_index_, row.data())) ++next_index_;
    ++next_index_;
    ++count_;
  }
}

SobolGenerator SobolGenerator::clone_with_offset(std::uint64_t offset) const {
  SobolGenerator g = *this;
  g.skip(offset);
  return g;
}

Grid gaussian_grid(const GaussComponent& c, Eigen::Index n, SobolGenerator& gen,
                   int source_component) {
  if (gen.dim() != c.dim())
    throw std::invalid_argument("gaussian_grid: generator dimension does not match component");
  Eigen::MatrixXd u = gen.next(n);
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index d = 0; d < u.cols(); ++d) u(i, d) = inverse_normal_cdf(u(i, d));
  Grid grid;
  grid.points = (u * c.chol().transpose()).rowwise() + c.mean().transpose();
  grid.source_component = source_component;
  return grid;
}

int default_grid_size(int p) {
  if (p < 1) throw std::invalid_argument("default_grid_size: p must be >= 1");
  return static_cast<int>(std::ceil(50.0 * std::pow(static_cast<double>(p), 1.25)));
}

}  // namespace iterlap
