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

#include <deque>

#include "mvmc/ansatz.hpp"

namespace mvmc {

/// One Metropolis-Hastings walker ensemble for a single state.
struct ChainState {
  std::vector<Configuration> walkers;
  std::vector<SignedLogValue> log_psi;  // cached eval at each walker
  double step_sigma = 1.0;
  std::deque<double> acc_window;        // recent per-step acceptance fractions
  std::uint64_t rng_stream = 0;
  std::uint64_t seed = 0;
  std::uint64_t step_count = 0;

  double window_acceptance() const;
};

/// Builds a chain of `n_walkers` walkers for `state`, with caches synced.
/// Stream ids are distinct per state by construction.
ChainState init_chain(const WaveFunctionModel& model, const ParamVector& params, int state,
                      int n_walkers, std::uint64_t seed);

/// One MH sweep: every walker proposes a joint Gaussian move of all particles
/// with scale step_sigma and accepts with min(1, exp(2 dlog|psi|)).
/// Proposals landing on a node (sign 0) are always rejected.
void mh_step(ChainState& chain, const WaveFunctionModel& model, const ParamVector& params,
             int state, int n_threads = 1);

/// Multiplicative step-size adaptation toward the target acceptance rate.
/// No-op until the window covers at least 20 steps.
void adapt_step(ChainState& chain, double target_acc);

/// One pooled sample: a configuration plus every state's evaluation at it.
struct PooledSample {
  Configuration config;
  std::vector<SignedLogValue> log_psi_all;
  int source_state = 0;
};

struct PooledBatch {
  std::vector<PooledSample> samples;
  std::vector<int> counts;  // per-state walker counts
  int n_states = 0;

  std::size_t size() const { return samples.size(); }
};

/// Concatenates all chains' walkers, evaluating every state's wave function
/// at every pooled configuration.
PooledBatch pool_batch(const std::vector<ChainState>& chains, const WaveFunctionModel& model,
                       const ParamVector& params);

}  // namespace mvmc
