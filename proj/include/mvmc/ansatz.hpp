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
#include <memory>
#include <optional>

#include "mvmc/matrix.hpp"
#include "mvmc/params.hpp"
#include "mvmc/pfaffian.hpp"
#include "mvmc/rng.hpp"
#include "mvmc/signed_log.hpp"

namespace mvmc {

/// Particle configuration: n_particles x d coordinates. d is 1 for the
/// analytic toy family and 3 for molecular systems, where the first n_up
/// particles are spin-up.
struct Configuration {
  Matrix coords;  // n_particles x d
  int n_up = 0;

  int n_particles() const { return static_cast<int>(coords.rows()); }
  int dim() const { return static_cast<int>(coords.cols()); }
  int spin(int i) const { return i < n_up ? 0 : 1; }
};

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};
struct NodeError : std::runtime_error {
  explicit NodeError(const std::string& what) : std::runtime_error(what) {}
};

struct LaplacianLog {
  double lap = 0.0;      // sum_i laplacian_i log|psi|
  double grad_sq = 0.0;  // sum_i |grad_i log|psi||^2
};

/// Common evaluation contract for all wave-function families. Models are
/// immutable after construction; parameters are always passed in.
class WaveFunctionModel {
 public:
  virtual ~WaveFunctionModel() = default;

  virtual int n_states() const = 0;
  virtual int n_particles() const = 0;
  virtual int space_dim() const = 0;
  virtual int n_up() const = 0;
  virtual const ParamLayout& layout() const = 0;

  virtual SignedLogValue eval(const ParamVector& params, int state,
                              const Configuration& config) const = 0;
  /// Gradient of log|psi_state| w.r.t. all parameters. Throws NodeError at
  /// an exact node. Slices exclusive to other states are exactly zero.
  virtual std::vector<double> grad_log(const ParamVector& params, int state,
                                       const Configuration& config) const = 0;
  virtual LaplacianLog laplacian_log(const ParamVector& params, int state,
                                     const Configuration& config) const = 0;

  /// Applies a state permutation to the state-exclusive parameter slices:
  /// new state s takes the parameters of old state perm[s].
  virtual void permute_states(ParamVector& params, const std::vector<int>& perm) const = 0;

  virtual Configuration initial_config(CounterRng& rng) const = 0;
  virtual ParamVector default_params(CounterRng& rng) const = 0;
};

/// Returns true iff exchanging same-spin particles i and j flips the sign of
/// psi_state and preserves log|psi| to 1e-12.
bool antisymmetry_check(const WaveFunctionModel& model, const ParamVector& params, int state,
                        const Configuration& config, int i, int j);

/// 1-D analytic family: psi_s(x) = (sum_m c_{s,m} H_m(sqrt(2 alpha) x)) exp(-alpha x^2)
/// with physicists' Hermite polynomials. With c_{s,m} = delta_{sm} and
/// alpha = omega/2 these are exact harmonic oscillator eigenstates.
class HermiteGaussianModel : public WaveFunctionModel {
 public:
  HermiteGaussianModel(int n_states, int max_degree);

  int n_states() const override { return n_states_; }
  int n_particles() const override { return 1; }
  int space_dim() const override { return 1; }
  int n_up() const override { return 1; }
  int max_degree() const { return max_degree_; }
  const ParamLayout& layout() const override { return layout_; }

  SignedLogValue eval(const ParamVector& params, int state, const Configuration& config) const override;
  std::vector<double> grad_log(const ParamVector& params, int state,
                               const Configuration& config) const override;
  LaplacianLog laplacian_log(const ParamVector& params, int state,
                             const Configuration& config) const override;
  void permute_states(ParamVector& params, const std::vector<int>& perm) const override;
  Configuration initial_config(CounterRng& rng) const override;
  ParamVector default_params(CounterRng& rng) const override;

  /// Exact eigenstate parameters: c_{s,m} = delta_{s,m}, given width.
  ParamVector eigenstate_params(double alpha) const;

 private:
  int n_states_;
  int max_degree_;
  ParamLayout layout_;
};

/// Multi-state Pfaffian ansatz over a fixed radial feature map. All states
/// share the orbital parameters; only the per-state antisymmetrizers differ.
class ExcitedPfaffianModel : public WaveFunctionModel {
 public:
  ExcitedPfaffianModel(int n_states, int n_det, int n_orb,
                       std::vector<std::array<double, 3>> nuclei, int n_up, int n_down);

  int n_states() const override { return n_states_; }
  int n_particles() const override { return n_up_ + n_down_; }
  int space_dim() const override { return 3; }
  int n_up() const override { return n_up_; }
  int n_det() const { return n_det_; }
  int n_orb() const { return n_orb_; }
  int n_features() const { return static_cast<int>(nuclei_.size()) * 4; }
  const std::vector<std::array<double, 3>>& nuclei() const { return nuclei_; }
  const ParamLayout& layout() const override { return layout_; }

  SignedLogValue eval(const ParamVector& params, int state, const Configuration& config) const override;
  std::vector<double> grad_log(const ParamVector& params, int state,
                               const Configuration& config) const override;
  LaplacianLog laplacian_log(const ParamVector& params, int state,
                             const Configuration& config) const override;
  void permute_states(ParamVector& params, const std::vector<int>& perm) const override;
  Configuration initial_config(CounterRng& rng) const override;
  ParamVector default_params(CounterRng& rng) const override;

  /// Orbital matrix Phi(r)_k (n_particles x n_orb) for determinant k.
  Matrix orbital_matrix(const ParamVector& params, const Configuration& config, int k) const;
  /// Antisymmetrizer A_{sk} expanded to dense form.
  Matrix antisymmetrizer(const ParamVector& params, int state, int k) const;
  void set_antisymmetrizer(ParamVector& params, int state, int k, const SkewMatrix& a) const;

  static std::string a_slice_name(int state);

  double fd_step() const { return fd_step_; }

 private:
  Matrix features(const Configuration& config) const;  // n_particles x n_feat
  Matrix envelopes(const ParamVector& params, const Configuration& config) const;  // n x n_orb

  int n_states_, n_det_, n_orb_, n_up_, n_down_;
  std::vector<std::array<double, 3>> nuclei_;
  ParamLayout layout_;
  double fd_step_ = 1e-4;
};

}  // namespace mvmc
