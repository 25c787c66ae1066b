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

#include "mvmc/estimators.hpp"
#include "mvmc/quadrature.hpp"

namespace mvmc {

/// I.i.d. pooled batch for the analytic 1-D family: each state's samples are
/// drawn by tabulated inverse-CDF from its own |psi_s|^2.
PooledBatch hermite_iid_batch(const WaveFunctionModel& model, const ParamVector& params,
                              int n_per_state, std::uint64_t seed);

/// Exact normalizer ratios r_s = N_1^2/N_s^2 by quadrature.
RatioVector exact_ratios(const WaveFunctionModel& model, const ParamVector& params);

/// 2-D zero-mean Gaussian mixture fixture: psi_s(x) = exp(-|x|^2/(4 sigma_s^2)),
/// samples N(0, sigma_s^2 I). Analytic normalizer ratio r_s = (sigma_1/sigma_s)^2.
PooledBatch gaussian_pooled_batch(const std::vector<double>& sigmas, int n_per_state,
                                  std::uint64_t seed);

/// 1-D unit-width Gaussians at the given centers; far-apart centers give the
/// disjoint-support fixture, an intermediate center bridges them.
PooledBatch translated_gaussian_batch(const std::vector<double>& centers, int n_per_state,
                                      std::uint64_t seed);

struct OverlapBenchRow {
  int n_states = 0;
  int rep = 0;
  double msis_total_sq = 0.0;    // sum over pairs of squared MSIS estimates
  double single_total_sq = 0.0;  // same for the single-state estimator
  double joint_bound = 0.0;      // S(S-1)/(2 N_batch)
  double pair_bound_sum = 0.0;   // sum over pairs of S F_st / (2 N_batch)
};

/// Repeated-batch variance comparison on exact orthogonal oscillator
/// eigenstates; the true overlaps are 0, so squared estimates are squared
/// deviations.
std::vector<OverlapBenchRow> benchmark_overlap(const std::vector<int>& state_grid, int n_batch,
                                               int reps, std::uint64_t seed);

std::string overlap_bench_csv(const std::vector<OverlapBenchRow>& rows);

struct BridgeBenchRow {
  int n_samples = 0;
  int iters = 0;
  double r2 = 0.0;
  double rel_err = 0.0;
  double residual = 0.0;
  bool converged = false;
  std::string fixture;
};

/// Ratio recovery on the two-sigma Gaussian fixture across sample sizes and
/// iteration counts, plus the disjoint/bridged three-state fixtures.
std::vector<BridgeBenchRow> benchmark_bridge(const std::vector<int>& n_grid, int max_iters,
                                             double clip, std::uint64_t seed);

std::string bridge_bench_csv(const std::vector<BridgeBenchRow>& rows);

}  // namespace mvmc
