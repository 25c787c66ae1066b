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

#include <cstdint>
#include <limits>
#include <string>

#include "mvmc/estimators.hpp"

namespace mvmc {

/// Adaptive penalty weights from running energy statistics.
struct PenaltySchedule {
  double beta_tilde = 4.0;
  double eps_floor = 1e-3;
  double decay = 0.99;
  std::vector<double> ema_energy;
  std::vector<double> ema_sigma;
  int n_updates = 0;

  void init(int n_states);
  void update(const std::vector<double>& energies, const std::vector<double>& sigmas);
  void permute(const std::vector<int>& perm);
};

/// beta_st = beta_tilde * max(|E_s - E_t|, sigma_s, eps) when state s sits
/// below state t in EMA energy, else 0; ties are broken so the lower index
/// penalizes the higher. During the first 10 updates the gap term is not yet
/// trustworthy and only max(sigma_s, eps) is used.
Matrix penalty_weights(const PenaltySchedule& schedule);

/// Stable-sort permutation of states by EMA energy: perm[new] = old.
std::vector<int> energy_order(const PenaltySchedule& schedule);

struct SnapResult {
  double s_star = 0.0;
  double loss = 0.0;
};

/// Picks the spin quantum number s* minimizing |s(s+1) - s2| over half
/// integers and returns lambda * (s2 - s*(s*+1))^2. When n_up/n_down are
/// supplied, candidates are restricted to the parity of (n_up - n_down)/2.
SnapResult snap_target(double s2, double lambda, int n_up = -1, int n_down = -1);

/// lambda(t) = 0.1 * sigmoid((t - t_ramp) / (width / (2 ln 9))).
double snap_ramp(double t, double t_ramp, double width);

/// Momentum SGD with 1/(1 + t/t_decay) learning-rate decay and global
/// gradient-norm clipping.
struct MomentumOptimizer {
  double lr0 = 0.02;
  double t_decay = 1e4;
  double momentum = 0.9;
  double grad_clip = 0.032;
  std::vector<double> velocity;

  void step(ParamVector& params, std::vector<double> grad, double t);
};

/// Gradient of beta_st |S_st|^2 for one pair, accumulated into grad. Only
/// the higher state t is pushed: the score-function expectation runs over
/// state t's samples with state s treated as constant, so the lower state
/// stays anchored by its own energy term and pairwise rotations (which
/// leave the energy sum and the overlap unchanged, but leak downhill for
/// any finite beta when both states respond) are suppressed. The centered
/// ratio values are clipped at 5x their 95th percentile magnitude.
/// The trailing factor o_st multiplies the whole expectation, so it must be
/// statistically independent of the batch: the product of the trailing
/// factor with its own centering term otherwise leaves a -Var[O_hat] *
/// grad log N bias that does not vanish at orthogonality and slowly drags
/// converged states into each other. Callers with a decorrelated centering
/// estimate pass it as o_center (defaults to o_st).
void add_overlap_pair_grad(const WaveFunctionModel& model, const ParamVector& params,
                           const PooledBatch& pooled, int s, int t, double o_st, double weight,
                           const RatioVector& ratios, std::vector<double>& grad,
                           double o_center = std::numeric_limits<double>::quiet_NaN());

/// Signed single-state overlap estimate (ablation path): the geometric-mean
/// form with the sign taken from the state-s directional mean.
double overlap_single_state_signed(const PooledBatch& pooled, const RatioVector& ratios, int s,
                                   int t);

struct TrainingOptions {
  int steps = 1000;
  int n_walkers_total = 512;
  int decorr_steps = 20;
  double target_acceptance = 0.525;
  double lr0 = 0.02;
  double t_decay = 1e4;
  double beta_tilde = 4.0;
  double grad_clip = 0.032;
  int bridge_iters = 10;
  double bridge_clip = 2.0;
  bool msis_enabled = true;
  bool snap_enabled = false;
  double snap_t_ramp = 5000.0;
  double snap_width = 500.0;
  std::vector<double> s2_values;  // per-state <S^2> supplied by config
  int trace_every = 10;
  int checkpoint_every = 1000;
  std::uint64_t seed = 0;
  int n_threads = 1;
  std::string output_dir;  // empty disables file emission
};

struct TrainResult {
  ParamVector params;
  std::vector<double> energies;
  std::vector<double> energy_stderr;
  Matrix overlap;
  Matrix bhattacharyya_;
  std::vector<double> ess_normalized;
  std::vector<double> step_sigmas;
  int steps_done = 0;
  bool nan_abort = false;
  bool collapse_flag = false;

  // trace rows kept in memory for the benchmark harnesses
  std::vector<std::vector<double>> energy_trace;   // step, state, E, stderr
  std::vector<std::vector<double>> overlap_trace;  // step, s, t, S, F, ess
};

/// The multi-state optimization loop: decorrelation sweeps, pooled batch,
/// bridge ratios, estimators, penalty gradient, clipped momentum update,
/// EMA bookkeeping and energy reordering.
TrainResult optimize(const WaveFunctionModel& model, const Hamiltonian& ham,
                     const TrainingOptions& options, const ParamVector& initial_params);

/// Checkpoint serialization: named parameter slices as base64 little-endian
/// doubles plus sampler and schedule state.
std::string checkpoint_to_json(int step, const ParamVector& params,
                               const PenaltySchedule& schedule,
                               const std::vector<double>& step_sigmas,
                               const std::vector<std::uint64_t>& rng_cursors);
void checkpoint_from_json(const std::string& text, int& step, ParamVector& params,
                          PenaltySchedule& schedule, std::vector<double>& step_sigmas,
                          std::vector<std::uint64_t>& rng_cursors);

}  // namespace mvmc
