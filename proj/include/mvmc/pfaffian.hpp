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

#pragma once

#include "mvmc/matrix.hpp"
#include "mvmc/signed_log.hpp"

namespace mvmc {

/// Skew-symmetric matrix of even dimension. Only the strict upper triangle
/// is stored; the full matrix is materialized on demand.
class SkewMatrix {
 public:
  explicit SkewMatrix(std::size_t dim);

  /// Builds from a dense matrix; rejects odd dimension and any
  /// entry pair with entries(i,j) != -entries(j,i).
  static SkewMatrix from_dense(const Matrix& dense);

  /// Builds from the strict upper triangle in row-major pair order
  /// (0,1),(0,2),...,(0,n-1),(1,2),...
  static SkewMatrix from_upper(std::size_t dim, const std::vector<double>& upper);

  std::size_t dim() const { return dim_; }

  double upper(std::size_t i, std::size_t j) const;  // requires i < j
  double& upper(std::size_t i, std::size_t j);       // requires i < j
  double entry(std::size_t i, std::size_t j) const;

  Matrix to_dense() const;
  const std::vector<double>& upper_data() const { return upper_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> upper_;
};

/// Pfaffian by Parlett-Reid tridiagonalization with partial pivoting,
/// accumulated in the log domain with exact sign tracking.
/// Singular input returns sign 0.
SignedLogValue pfaffian(const SkewMatrix& m);

/// Same algorithm on a dense skew-symmetric matrix (no even-dimension or
/// antisymmetry check; odd dimension returns 0). Used on M = Phi A Phi^T
/// products where antisymmetry holds analytically but not bitwise.
SignedLogValue pfaffian_dense(Matrix a);

/// Exact Pfaffian via the signed sum over perfect matchings. Test oracle;
/// dimensions above 10 are rejected.
double pfaffian_bruteforce(const SkewMatrix& m);

}  // namespace mvmc
