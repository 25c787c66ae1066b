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

#include "mvmc/hamiltonian.hpp"

#include <cmath>

namespace mvmc {

double Harmonic1D::potential(const Configuration& config) const {
  double v = 0.0;
  for (std::size_t i = 0; i < config.coords.rows(); ++i) {
    const double x = config.coords(i, 0);
    v += 0.5 * omega_ * omega_ * x * x;
  }
  return v;
}

double Polynomial1D::potential(const Configuration& config) const {
  double v = 0.0;
  for (std::size_t i = 0; i < config.coords.rows(); ++i) {
    const double x = config.coords(i, 0);
    double xk = 1.0;
    for (double c : coeffs_) {
      v += c * xk;
      xk *= x;
    }
  }
  return v;
}

Molecular::Molecular(std::vector<std::array<double, 3>> nuclei, std::vector<double> charges)
    : nuclei_(std::move(nuclei)), charges_(std::move(charges)) {
  for (std::size_t m = 0; m < nuclei_.size(); ++m) {
    for (std::size_t n = m + 1; n < nuclei_.size(); ++n) {
      double d2 = 0.0;
      for (int d = 0; d < 3; ++d) {
        const double diff = nuclei_[m][d] - nuclei_[n][d];
        d2 += diff * diff;
      }
      nuclear_repulsion_ += charges_[m] * charges_[n] / std::sqrt(d2);
    }
  }
}

double Molecular::potential(const Configuration& config) const {
  double v = nuclear_repulsion_;
  const std::size_t n = config.coords.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (int d = 0; d < 3; ++d) {
        const double diff = config.coords(i, d) - config.coords(j, d);
        d2 += diff * diff;
      }
      v += 1.0 / std::sqrt(d2);
    }
    for (std::size_t m = 0; m < nuclei_.size(); ++m) {
      double d2 = 0.0;
      for (int d = 0; d < 3; ++d) {
        const double diff = config.coords(i, d) - nuclei_[m][d];
        d2 += diff * diff;
      }
      v -= charges_[m] / std::sqrt(d2);
    }
  }
  return v;
}

}  // namespace mvmc
