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

namespace mvmc {

struct SvdResult {
  Matrix u;                       // rows x k, orthonormal columns
  std::vector<double> singular;   // non-increasing, nonnegative
  Matrix v;                       // cols x k, orthonormal columns
};

/// One-sided Jacobi SVD. Convergence threshold 1e-12 on off-diagonal mass,
/// 100 sweep cap; non-convergence throws.
SvdResult svd(const Matrix& m);

struct ProcrustesResult {
  Matrix rotation;   // k x k orthogonal
  bool degenerate = false;  // repeated/zero singular values; solution not unique
};

/// Orthogonal Procrustes: R minimizing ||src R - dst||_F over orthogonal R,
/// i.e. R = U V^T from the SVD of src^T dst.
ProcrustesResult procrustes(const Matrix& src, const Matrix& dst);

/// Same closed form applied directly to a cross matrix M = src^T dst.
ProcrustesResult procrustes_from_cross(const Matrix& cross);

/// Inverse square root of a symmetric positive definite matrix via Jacobi
/// eigendecomposition; eigenvalues floored at 1e-12 before inversion.
Matrix sym_inverse_sqrt(const Matrix& a);

/// c (c^T s c)^{-1/2}: the closest s-orthonormal matrix to c.
/// Throws if c^T s c is not positive definite.
Matrix symmetric_orthogonalize(const Matrix& c, const Matrix& s);

}  // namespace mvmc
