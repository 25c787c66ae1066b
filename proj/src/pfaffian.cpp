/*
 * Copyright 2026 The mvmc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mvmc/pfaffian.hpp"

#include <cmath>
#include <numeric>

namespace mvmc {

SkewMatrix::SkewMatrix(std::size_t dim) : dim_(dim), upper_(dim * (dim - 1) / 2, 0.0) {
  if (dim == 0 || dim % 2 != 0) throw std::invalid_argument("SkewMatrix: dimension must be even and positive");
}

SkewMatrix SkewMatrix::from_dense(const Matrix& dense) {
  if (dense.rows() != dense.cols()) throw std::invalid_argument("SkewMatrix: not square");
  SkewMatrix m(dense.rows());
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    if (dense(i, i) != 0.0) throw std::invalid_argument("SkewMatrix: nonzero diagonal");
    for (std::size_t j = i + 1; j < dense.cols(); ++j) {
      if (dense(i, j) != -dense(j, i)) throw std::invalid_argument("SkewMatrix: not antisymmetric");
      m.upper(i, j) = dense(i, j);
    }
  }
  return m;
}

SkewMatrix SkewMatrix::from_upper(std::size_t dim, const std::vector<double>& upper) {
  SkewMatrix m(dim);
  if (upper.size() != m.upper_.size()) throw std::invalid_argument("SkewMatrix: wrong triangle size");
  m.upper_ = upper;
  return m;
}

double SkewMatrix::upper(std::size_t i, std::size_t j) const {
  assert(i < j && j < dim_);
  return upper_[i * dim_ - i * (i + 1) / 2 + (j - i - 1)];
}

double& SkewMatrix::upper(std::size_t i, std::size_t j) {
  assert(i < j && j < dim_);
  return upper_[i * dim_ - i * (i + 1) / 2 + (j - i - 1)];
}

double SkewMatrix::entry(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  return i < j ? upper(i, j) : -upper(j, i);
}

Matrix SkewMatrix::to_dense() const {
  Matrix d(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i + 1; j < dim_; ++j) {
      d(i, j) = upper(i, j);
      d(j, i) = -upper(i, j);
    }
  return d;
}

SignedLogValue pfaffian(const SkewMatrix& m) { return pfaffian_dense(m.to_dense()); }

SignedLogValue pfaffian_dense(Matrix a) {
  const std::size_t n = a.rows();
  if (n == 0) return SignedLogValue::one();
  if (n % 2 != 0) return SignedLogValue::zero();

  int sign = 1;
  double log_abs = 0.0;
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    // Pivot the largest entry of column k below the diagonal into row k+1.
    std::size_t kp = k + 1;
    for (std::size_t i = k + 2; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(kp, k))) kp = i;
    if (kp != k + 1) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k + 1, j), a(kp, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k + 1), a(i, kp));
      sign = -sign;
    }
    const double pivot = a(k + 1, k);
    if (pivot == 0.0) return SignedLogValue::zero();
    // Pf of the 2x2 block contributes a(k, k+1) = -pivot.
    if (-pivot < 0.0) sign = -sign;
    log_abs += std::log(std::abs(pivot));
    if (k + 2 < n) {
      // Gauss transform eliminating column k below row k+1; the rank-2
      // update preserves skew symmetry of the trailing block.
      std::vector<double> tau(n - k - 2);
      for (std::size_t i = k + 2; i < n; ++i) tau[i - k - 2] = a(i, k) / pivot;
      for (std::size_t i = k + 2; i < n; ++i) {
        for (std::size_t j = k + 2; j < n; ++j) {
          a(i, j) -= tau[i - k - 2] * a(k + 1, j) - tau[j - k - 2] * a(k + 1, i);
        }
      }
    }
  }
  return {sign, log_abs};
}

namespace {

double pf_recurse(const SkewMatrix& m, std::vector<std::size_t>& idx) {
  if (idx.empty()) return 1.0;
  const std::size_t i0 = idx[0];
  double acc = 0.0;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    const double aij = m.entry(i0, idx[j]);
    if (aij == 0.0) continue;
    std::vector<std::size_t> rest;
    rest.reserve(idx.size() - 2);
    for (std::size_t k = 1; k < idx.size(); ++k)
      if (k != j) rest.push_back(idx[k]);
    const double s = (j % 2 == 1) ? 1.0 : -1.0;
    acc += s * aij * pf_recurse(m, rest);
  }
  return acc;
}

}  // namespace

double pfaffian_bruteforce(const SkewMatrix& m) {
  if (m.dim() > 10) throw std::invalid_argument("pfaffian_bruteforce: dimension above oracle limit");
  std::vector<std::size_t> idx(m.dim());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return pf_recurse(m, idx);
}

}  // namespace mvmc
