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

#include <array>
#include <vector>

#include "mvmc/ansatz.hpp"

namespace mvmc {

/// Potential-energy part of a Hamiltonian H = -1/2 sum_i lap_i + V.
class Hamiltonian {
 public:
  virtual ~Hamiltonian() = default;
  virtual double potential(const Configuration& config) const = 0;
};

/// V(x) = 1/2 omega^2 x^2 summed over particles (1-D).
class Harmonic1D : public Hamiltonian {
 public:
  explicit Harmonic1D(double omega) : omega_(omega) {}
  double potential(const Configuration& config) const override;
  double omega() const { return omega_; }

 private:
  double omega_;
};

/// V(x) = sum_k coeffs[k] x^k summed over particles (1-D).
class Polynomial1D : public Hamiltonian {
 public:
  explicit Polynomial1D(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}
  double potential(const Configuration& config) const override;
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// Coulomb potential: electron-electron repulsion, electron-nuclear
/// attraction, and the constant nuclear repulsion.
class Molecular : public Hamiltonian {
 public:
  Molecular(std::vector<std::array<double, 3>> nuclei, std::vector<double> charges);
  double potential(const Configuration& config) const override;
  double nuclear_repulsion() const { return nuclear_repulsion_; }

 private:
  std::vector<std::array<double, 3>> nuclei_;
  std::vector<double> charges_;
  double nuclear_repulsion_ = 0.0;
};

}  // namespace mvmc
