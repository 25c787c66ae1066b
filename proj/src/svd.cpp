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

#include "mvmc/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mvmc {

namespace {

constexpr double kJacobiTol = 1e-12;
constexpr int kMaxSweeps = 100;

// One-sided Jacobi on a tall matrix (rows >= cols).
SvdResult svd_tall(const Matrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  Matrix a = m;
  Matrix v = Matrix::identity(cols);

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          app += a(i, p) * a(i, p);
          aqq += a(i, q) * a(i, q);
          apq += a(i, p) * a(i, q);
        }
        if (std::abs(apq) <= kJacobiTol * std::sqrt(app * aqq) || apq == 0.0) continue;
        converged = false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < rows; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < cols; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  if (!converged) throw std::runtime_error("svd: Jacobi sweeps did not converge");

  SvdResult out;
  out.singular.resize(cols);
  out.u = Matrix(rows, cols);
  out.v = v;
  double max_sigma = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += a(i, j) * a(i, j);
    norm = std::sqrt(norm);
    out.singular[j] = norm;
    max_sigma = std::max(max_sigma, norm);
  }
  const double tiny = std::max(max_sigma, 1.0) * 1e-300;
  for (std::size_t j = 0; j < cols; ++j) {
    if (out.singular[j] > tiny) {
      for (std::size_t i = 0; i < rows; ++i) out.u(i, j) = a(i, j) / out.singular[j];
    }
  }
  // Fill columns belonging to zero singular values with an orthonormal
  // completion so that U always has orthonormal columns.
  for (std::size_t j = 0; j < cols; ++j) {
    if (out.singular[j] > tiny) continue;
    for (std::size_t cand = 0; cand < rows; ++cand) {
      std::vector<double> e(rows, 0.0);
      e[cand] = 1.0;
      for (std::size_t jj = 0; jj < cols; ++jj) {
        if (jj == j) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < rows; ++i) dot += e[i] * out.u(i, jj);
        for (std::size_t i = 0; i < rows; ++i) e[i] -= dot * out.u(i, jj);
      }
      double norm = 0.0;
      for (double x : e) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 1e-6) {
        for (std::size_t i = 0; i < rows; ++i) out.u(i, j) = e[i] / norm;
        break;
      }
    }
  }
  // Sort singular values non-increasing.
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return out.singular[i] > out.singular[j];
  });
  SvdResult sorted;
  sorted.singular.resize(cols);
  sorted.u = Matrix(rows, cols);
  sorted.v = Matrix(cols, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    sorted.singular[j] = out.singular[order[j]];
    for (std::size_t i = 0; i < rows; ++i) sorted.u(i, j) = out.u(i, order[j]);
    for (std::size_t i = 0; i < cols; ++i) sorted.v(i, j) = out.v(i, order[j]);
  }
  return sorted;
}

}  // namespace

SvdResult svd(const Matrix& m) {
  if (m.rows() >= m.cols()) return svd_tall(m);
  SvdResult t = svd_tall(m.transpose());
  return {t.v, t.singular, t.u};
}

ProcrustesResult procrustes_from_cross(const Matrix& cross) {
  SvdResult s = svd(cross);
  ProcrustesResult out;
  out.rotation = s.u * s.v.transpose();
  const double scale = std::max(s.singular.empty() ? 0.0 : s.singular.front(), 1.0);
  out.degenerate = s.singular.empty() || s.singular.back() <= 1e-12 * scale;
  return out;
}

ProcrustesResult procrustes(const Matrix& src, const Matrix& dst) {
  if (src.rows() != dst.rows() || src.cols() != dst.cols())
    throw std::invalid_argument("procrustes: shape mismatch");
  if (src.cols() > src.rows()) throw std::invalid_argument("procrustes: requires k <= n");
  return procrustes_from_cross(src.transpose() * dst);
}

Matrix sym_inverse_sqrt(const Matrix& a) {
  SymEig e = jacobi_eigensolve(a);
  const std::size_t n = a.rows();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = std::max(e.values[k], 1e-12);
    const double w = 1.0 / std::sqrt(lam);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += w * e.vectors(i, k) * e.vectors(j, k);
  }
  return out;
}

Matrix symmetric_orthogonalize(const Matrix& c, const Matrix& s) {
  Matrix gram = c.transpose() * (s * c);
  SymEig e = jacobi_eigensolve(gram);
  for (double lam : e.values)
    if (lam <= 1e-12) throw std::runtime_error("symmetric_orthogonalize: singular projection");
  return c * sym_inverse_sqrt(gram);
}

}  // namespace mvmc
