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

#include <string>

#include "mvmc/hamiltonian.hpp"
#include "mvmc/sampler.hpp"

namespace mvmc {

/// Normalizer ratios r_s = N_1^2 / N_s^2 with r_1 fixed to 1.
struct RatioVector {
  std::vector<double> r;

  static RatioVector ones(int n) { return RatioVector{std::vector<double>(n, 1.0)}; }
  int size() const { return static_cast<int>(r.size()); }
};

struct InternalConsistencyError : std::runtime_error {
  explicit InternalConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

/// E_loc(x) = -1/2 sum_i (lap_i log|psi| + |grad_i log|psi||^2) + V(x).
double local_energy(const Hamiltonian& ham, const WaveFunctionModel& model,
                    const ParamVector& params, int state, const Configuration& config);

struct EnergyGrad {
  double energy = 0.0;
  double stderr_ = 0.0;
  double sigma = 0.0;  // clipped local-energy standard deviation
  std::vector<double> grad;
  int n_used = 0;
  int n_skipped = 0;  // node-flagged samples
};

/// Clipped energy mean and the centered score-function gradient
/// 2 E[(E_loc - E) grad log|psi|]. Local energies are clipped to
/// median +- 5 x the 95th percentile of absolute deviation.
EnergyGrad energy_and_grad(const Hamiltonian& ham, const WaveFunctionModel& model,
                           const ParamVector& params, int state,
                           const std::vector<Configuration>& configs);

struct SingleStateOverlap {
  double value = 0.0;  // |S_st|, geometric-mean form
  int n_clamped = 0;   // log-ratio clamp events
};

/// |S_st| = sqrt(E_{p_s}[psi_t/psi_s] * E_{p_t}[psi_s/psi_t]), product floored
/// at 0. Log-ratios are clamped at +-50; the integrand is unbounded and a
/// single near-node denominator must not poison the mean.
SingleStateOverlap overlap_single_state(const PooledBatch& pooled, int s, int t);

/// MSIS estimator: S_st = E_pbar[Psi_t Psi_s / pbar] over the pooled batch.
/// Asserts the AM-GM pointwise bound |f_st| <= S/2 on every sample.
Matrix overlap_msis(const PooledBatch& pooled, const RatioVector& ratios);

/// Same estimator with independently chosen mixture-density ratios. With
/// den_ratios != ratios the AM-GM bound no longer holds; used as the
/// seeded negative control for the bound assertion.
Matrix overlap_msis_with_denominator(const PooledBatch& pooled, const RatioVector& ratios,
                                     const RatioVector& den_ratios);

/// Per-sample MSIS integrand f_st; exposed for gradient assembly.
double msis_integrand(const PooledSample& sample, const RatioVector& ratios, int s, int t);

struct BridgeResult {
  RatioVector ratios;
  double residual = 0.0;  // max relative change on the last iteration
  bool converged = false;
  bool singular = false;  // regularized solve was needed
};

/// Fixed-point bridge sampling for normalizer ratios: each iteration solves
/// the stationary-weight linear system built from per-state responsibility
/// means, then applies a multiplicatively clipped update.
BridgeResult bridge_ratios(const PooledBatch& pooled, int iters = 10, double clip = 2.0);

/// Bhattacharyya coefficients F_st = E_pbar[|Psi_s||Psi_t| / pbar].
Matrix bhattacharyya(const PooledBatch& pooled, const RatioVector& ratios);

struct EssResult {
  double ess = 0.0;
  double normalized = 0.0;  // ess * S / N_batch
};

EssResult kish_ess(const PooledBatch& pooled, const RatioVector& ratios, int state);

struct OverlapReport {
  Matrix s_hat;  // signed MSIS overlaps, diagonal 1
  Matrix f_hat;
  RatioVector ratios;
  std::vector<double> ess;
  std::vector<double> ess_normalized;
  double fixed_point_residual = 0.0;
  bool bridge_converged = true;

  std::string to_json() const;
};

/// Runs bridge sampling then all pooled overlap diagnostics for one step.
OverlapReport overlap_report(const PooledBatch& pooled, int bridge_iters = 10,
                             double bridge_clip = 2.0);

}  // namespace mvmc
