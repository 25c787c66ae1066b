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

#include "mvmc/benchmarks.hpp"

#include <cmath>
#include <sstream>

#include "mvmc/grid_sampler.hpp"

namespace mvmc {

namespace {

Configuration config_1d(double x) {
  Configuration c;
  c.coords = Matrix(1, 1);
  c.coords(0, 0) = x;
  c.n_up = 1;
  return c;
}

}  // namespace

PooledBatch hermite_iid_batch(const WaveFunctionModel& model, const ParamVector& params,
                              int n_per_state, std::uint64_t seed) {
  const int n_states = model.n_states();
  PooledBatch batch;
  batch.n_states = n_states;
  for (int s = 0; s < n_states; ++s) {
    const GridSampler1D sampler(
        [&](double x) {
          const SignedLogValue v = model.eval(params, s, config_1d(x));
          return v.sign == 0 ? 0.0 : std::exp(2.0 * v.log_abs);
        },
        -8.0, 8.0);
    CounterRng rng(seed, 0x69696400ULL + static_cast<std::uint64_t>(s), 0, 0);
    batch.counts.push_back(n_per_state);
    for (int i = 0; i < n_per_state; ++i) {
      PooledSample sample;
      sample.config = config_1d(sampler.sample(rng));
      sample.source_state = s;
      for (int t = 0; t < n_states; ++t)
        sample.log_psi_all.push_back(model.eval(params, t, sample.config));
      batch.samples.push_back(std::move(sample));
    }
  }
  return batch;
}

RatioVector exact_ratios(const WaveFunctionModel& model, const ParamVector& params) {
  RatioVector ratios;
  const double n1 = quadrature_norm_sq(model, params, 0);
  for (int s = 0; s < model.n_states(); ++s)
    ratios.r.push_back(n1 / quadrature_norm_sq(model, params, s));
  return ratios;
}

PooledBatch gaussian_pooled_batch(const std::vector<double>& sigmas, int n_per_state,
                                  std::uint64_t seed) {
  const int n_states = static_cast<int>(sigmas.size());
  PooledBatch batch;
  batch.n_states = n_states;
  for (int s = 0; s < n_states; ++s) {
    CounterRng rng(seed, 0x67617573ULL + static_cast<std::uint64_t>(s), 0, 0);
    batch.counts.push_back(n_per_state);
    for (int i = 0; i < n_per_state; ++i) {
      const double x = sigmas[static_cast<std::size_t>(s)] * rng.normal();
      const double y = sigmas[static_cast<std::size_t>(s)] * rng.normal();
      PooledSample sample;
      sample.config.coords = Matrix(1, 2);
      sample.config.coords(0, 0) = x;
      sample.config.coords(0, 1) = y;
      sample.config.n_up = 1;
      sample.source_state = s;
      for (int t = 0; t < n_states; ++t) {
        const double st = sigmas[static_cast<std::size_t>(t)];
        sample.log_psi_all.push_back({1, -(x * x + y * y) / (4.0 * st * st)});
      }
      batch.samples.push_back(std::move(sample));
    }
  }
  return batch;
}

PooledBatch translated_gaussian_batch(const std::vector<double>& centers, int n_per_state,
                                      std::uint64_t seed) {
  const int n_states = static_cast<int>(centers.size());
  PooledBatch batch;
  batch.n_states = n_states;
  for (int s = 0; s < n_states; ++s) {
    CounterRng rng(seed, 0x7472616eULL + static_cast<std::uint64_t>(s), 0, 0);
    batch.counts.push_back(n_per_state);
    for (int i = 0; i < n_per_state; ++i) {
      const double x = centers[static_cast<std::size_t>(s)] + rng.normal();
      PooledSample sample;
      sample.config = config_1d(x);
      sample.source_state = s;
      for (int t = 0; t < n_states; ++t) {
        const double d = x - centers[static_cast<std::size_t>(t)];
        sample.log_psi_all.push_back({1, -d * d / 4.0});
      }
      batch.samples.push_back(std::move(sample));
    }
  }
  return batch;
}

std::vector<OverlapBenchRow> benchmark_overlap(const std::vector<int>& state_grid, int n_batch,
                                               int reps, std::uint64_t seed) {
  std::vector<OverlapBenchRow> rows;
  for (int n_states : state_grid) {
    const HermiteGaussianModel model(n_states, n_states - 1);
    const ParamVector params = model.eigenstate_params(0.5);
    const RatioVector ratios = exact_ratios(model, params);
    const int n_per_state = n_batch / n_states;
    const int n_total = n_per_state * n_states;
    for (int rep = 0; rep < reps; ++rep) {
      const PooledBatch batch = hermite_iid_batch(
          model, params, n_per_state, seed + 1000003ULL * static_cast<std::uint64_t>(rep));
      OverlapBenchRow row;
      row.n_states = n_states;
      row.rep = rep;
      row.joint_bound = n_states <= 1
                            ? 0.0
                            : static_cast<double>(n_states) * (n_states - 1) / (2.0 * n_total);
      if (n_states > 1) {
        const Matrix msis = overlap_msis(batch, ratios);
        const Matrix f = bhattacharyya(batch, ratios);
        for (int s = 0; s < n_states; ++s)
          for (int t = s + 1; t < n_states; ++t) {
            const double m = msis(static_cast<std::size_t>(s), static_cast<std::size_t>(t));
            row.msis_total_sq += m * m;
            const double ss = overlap_single_state(batch, s, t).value;
            row.single_total_sq += ss * ss;
            row.pair_bound_sum +=
                static_cast<double>(n_states) *
                f(static_cast<std::size_t>(s), static_cast<std::size_t>(t)) / (2.0 * n_total);
          }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string overlap_bench_csv(const std::vector<OverlapBenchRow>& rows) {
  std::ostringstream out;
  out << "n_states,rep,msis_total_sq,single_total_sq,joint_bound,pair_bound_sum\n";
  for (const OverlapBenchRow& r : rows)
    out << r.n_states << ',' << r.rep << ',' << r.msis_total_sq << ',' << r.single_total_sq << ','
        << r.joint_bound << ',' << r.pair_bound_sum << '\n';
  return out.str();
}

std::vector<BridgeBenchRow> benchmark_bridge(const std::vector<int>& n_grid, int max_iters,
                                             double clip, std::uint64_t seed) {
  std::vector<BridgeBenchRow> rows;
  const std::vector<double> sigmas = {1.0, 2.0};
  constexpr double kTrueR2 = 0.25;
  for (int n : n_grid) {
    for (int iters = 1; iters <= max_iters; iters *= 2) {
      const PooledBatch batch = gaussian_pooled_batch(sigmas, n / 2, seed);
      const BridgeResult res = bridge_ratios(batch, iters, clip);
      BridgeBenchRow row;
      row.n_samples = n;
      row.iters = iters;
      row.r2 = res.ratios.r[1];
      row.rel_err = std::fabs(row.r2 - kTrueR2) / kTrueR2;
      row.residual = res.residual;
      row.converged = res.converged;
      row.fixture = "two_sigma_gaussian";
      rows.push_back(row);
    }
  }

  const int n_fixture = 4000;
  {
    const PooledBatch disjoint = translated_gaussian_batch({0.0, 12.0}, n_fixture, seed + 7);
    const BridgeResult res = bridge_ratios(disjoint, max_iters, clip);
    rows.push_back({2 * n_fixture, max_iters, res.ratios.r[1],
                    std::fabs(res.ratios.r[1] - 1.0), res.residual, res.converged,
                    "disjoint_support"});
  }
  {
    const PooledBatch bridged = translated_gaussian_batch({0.0, 12.0, 6.0}, n_fixture, seed + 7);
    const BridgeResult res = bridge_ratios(bridged, max_iters, clip);
    rows.push_back({3 * n_fixture, max_iters, res.ratios.r[1],
                    std::fabs(res.ratios.r[1] - 1.0), res.residual, res.converged,
                    "bridged_support"});
  }
  return rows;
}

std::string bridge_bench_csv(const std::vector<BridgeBenchRow>& rows) {
  std::ostringstream out;
  out << "fixture,n_samples,iters,r2,rel_err,residual,converged\n";
  for (const BridgeBenchRow& r : rows)
    out << r.fixture << ',' << r.n_samples << ',' << r.iters << ',' << r.r2 << ',' << r.rel_err
        << ',' << r.residual << ',' << (r.converged ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace mvmc
