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

#include "mvmc/sampler.hpp"

#include <cmath>
#include <thread>

namespace mvmc {

double ChainState::window_acceptance() const {
  if (acc_window.empty()) return 0.0;
  double s = 0.0;
  for (double a : acc_window) s += a;
  return s / static_cast<double>(acc_window.size());
}

ChainState init_chain(const WaveFunctionModel& model, const ParamVector& params, int state,
                      int n_walkers, std::uint64_t seed) {
  ChainState chain;
  chain.seed = seed;
  chain.rng_stream = static_cast<std::uint64_t>(state) + 1;
  chain.walkers.reserve(static_cast<std::size_t>(n_walkers));
  chain.log_psi.reserve(static_cast<std::size_t>(n_walkers));
  for (int w = 0; w < n_walkers; ++w) {
    CounterRng rng(seed, chain.rng_stream, static_cast<std::uint64_t>(w), 0);
    Configuration c = model.initial_config(rng);
    SignedLogValue lp = model.eval(params, state, c);
    // Re-draw node-starting walkers a few times; exact nodes have measure zero.
    for (int attempt = 0; attempt < 16 && lp.sign == 0; ++attempt) {
      c = model.initial_config(rng);
      lp = model.eval(params, state, c);
    }
    chain.walkers.push_back(std::move(c));
    chain.log_psi.push_back(lp);
  }
  return chain;
}

namespace {

void advance_range(ChainState& chain, const WaveFunctionModel& model, const ParamVector& params,
                   int state, std::size_t begin, std::size_t end, std::uint64_t step,
                   int* accepted) {
  int acc = 0;
  for (std::size_t w = begin; w < end; ++w) {
    CounterRng rng(chain.seed, chain.rng_stream, static_cast<std::uint64_t>(w), step);
    Configuration proposal = chain.walkers[w];
    for (std::size_t i = 0; i < proposal.coords.rows(); ++i)
      for (std::size_t d = 0; d < proposal.coords.cols(); ++d)
        proposal.coords(i, d) += chain.step_sigma * rng.normal();
    const SignedLogValue lp = model.eval(params, state, proposal);
    bool accept = false;
    if (lp.sign != 0) {
      const double dlog = lp.log_abs - chain.log_psi[w].log_abs;
      accept = dlog >= 0.0 || rng.uniform() < std::exp(2.0 * dlog);
    }
    if (accept) {
      chain.walkers[w] = std::move(proposal);
      chain.log_psi[w] = lp;
      ++acc;
    }
  }
  *accepted = acc;
}

}  // namespace

void mh_step(ChainState& chain, const WaveFunctionModel& model, const ParamVector& params,
             int state, int n_threads) {
  const std::size_t n = chain.walkers.size();
  const std::uint64_t step = ++chain.step_count;
  int total_accepted = 0;
  if (n_threads <= 1 || n < 64) {
    advance_range(chain, model, params, state, 0, n, step, &total_accepted);
  } else {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
    std::vector<int> accepted(workers, 0);
    std::vector<std::thread> threads;
    const std::size_t block = (n + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t) {
      const std::size_t b = t * block;
      const std::size_t e = std::min(n, b + block);
      if (b >= e) break;
      threads.emplace_back(advance_range, std::ref(chain), std::cref(model), std::cref(params),
                           state, b, e, step, &accepted[t]);
    }
    for (auto& th : threads) th.join();
    for (int a : accepted) total_accepted += a;
  }
  chain.acc_window.push_back(static_cast<double>(total_accepted) / static_cast<double>(n));
  while (chain.acc_window.size() > 100) chain.acc_window.pop_front();
}

void adapt_step(ChainState& chain, double target_acc) {
  if (chain.acc_window.size() < 20) return;
  constexpr double kEta = 0.1;
  const double acc = chain.window_acceptance();
  chain.step_sigma *= std::exp(kEta * (acc - target_acc));
  chain.step_sigma = std::clamp(chain.step_sigma, 1e-3, 1e2);
}

PooledBatch pool_batch(const std::vector<ChainState>& chains, const WaveFunctionModel& model,
                       const ParamVector& params) {
  PooledBatch batch;
  batch.n_states = static_cast<int>(chains.size());
  for (const auto& chain : chains) batch.counts.push_back(static_cast<int>(chain.walkers.size()));
  for (int s = 0; s < batch.n_states; ++s) {
    const ChainState& chain = chains[static_cast<std::size_t>(s)];
    for (std::size_t w = 0; w < chain.walkers.size(); ++w) {
      PooledSample sample;
      sample.config = chain.walkers[w];
      sample.source_state = s;
      sample.log_psi_all.resize(static_cast<std::size_t>(batch.n_states));
      for (int t = 0; t < batch.n_states; ++t) {
        if (t == s) {
          sample.log_psi_all[static_cast<std::size_t>(t)] = chain.log_psi[w];
        } else {
          try {
            sample.log_psi_all[static_cast<std::size_t>(t)] = model.eval(params, t, sample.config);
          } catch (const EvalError& err) {
            throw EvalError("pool_batch: state " + std::to_string(t) + " walker " +
                            std::to_string(w) + " of chain " + std::to_string(s) + ": " +
                            err.what());
          }
        }
      }
      batch.samples.push_back(std::move(sample));
    }
  }
  return batch;
}

}  // namespace mvmc
