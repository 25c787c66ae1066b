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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mvmc/benchmarks.hpp"
#include "mvmc/quadrature.hpp"
#include "mvmc/stats.hpp"
#include "mvmc/training.hpp"

using namespace mvmc;

namespace {

PenaltySchedule schedule_with(std::vector<double> energies, std::vector<double> sigmas,
                              int n_updates = 100) {
  PenaltySchedule s;
  s.init(static_cast<int>(energies.size()));
  s.ema_energy = std::move(energies);
  s.ema_sigma = std::move(sigmas);
  s.n_updates = n_updates;
  return s;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / std::sqrt(na * nb);
}

}  // namespace

TEST_CASE("penalty_weights") {
  SUBCASE("gap-dominated pair") {
    const Matrix beta = penalty_weights(schedule_with({-1.0, -0.5}, {1e-4, 1e-4}));
    CHECK(beta(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(beta(1, 0) == 0.0);
  }

  SUBCASE("exact tie: lower index penalizes the higher") {
    const Matrix beta = penalty_weights(schedule_with({-0.7, -0.7}, {0.05, 0.02}));
    CHECK(beta(0, 1) == doctest::Approx(4.0 * 0.05).epsilon(1e-12));
    CHECK(beta(1, 0) == 0.0);
  }

  SUBCASE("all terms below the floor") {
    const Matrix beta = penalty_weights(schedule_with({-1.0, -1.0 + 1e-7}, {1e-8, 1e-8}));
    CHECK(beta(0, 1) == doctest::Approx(4.0 * 1e-3).epsilon(1e-12));
  }

  SUBCASE("early updates ignore the unreliable gap") {
    const Matrix beta = penalty_weights(schedule_with({-3.0, -0.5}, {0.01, 0.01}, 5));
    CHECK(beta(0, 1) == doctest::Approx(4.0 * 0.01).epsilon(1e-12));
  }

  SUBCASE("triangular structure under the energy sort") {
    const std::vector<double> energies = {0.3, -1.2, 0.3, 2.0, -0.4};
    const PenaltySchedule schedule = schedule_with(energies, std::vector<double>(5, 0.1));
    const Matrix beta = penalty_weights(schedule);
    for (int s = 0; s < 5; ++s)
      for (int t = 0; t < 5; ++t) {
        const bool penalizes =
            energies[s] < energies[t] || (energies[s] == energies[t] && s < t);
        if (s == t || !penalizes) CHECK(beta(s, t) == 0.0);
        if (penalizes) CHECK(beta(s, t) > 0.0);
      }
  }
}

TEST_CASE("energy_order") {
  CHECK(energy_order(schedule_with({-0.5, -1.0}, {0, 0})) == std::vector<int>{1, 0});
  CHECK(energy_order(schedule_with({-1.0, -0.5}, {0, 0})) == std::vector<int>{0, 1});
  CHECK(energy_order(schedule_with({0.2, 0.2, 0.1}, {0, 0, 0})) == std::vector<int>{2, 0, 1});
  CHECK(energy_order(schedule_with({0.5, 0.5}, {0, 0})) == std::vector<int>{0, 1});
}

TEST_CASE("snap_target") {
  const double lambda = 0.7;

  SUBCASE("spec values") {
    SnapResult r = snap_target(0.3, lambda);
    CHECK(r.s_star == 0.0);
    CHECK(r.loss == doctest::Approx(lambda * 0.09).epsilon(1e-12));

    r = snap_target(1.9, lambda);
    CHECK(r.s_star == 1.0);
    CHECK(r.loss == doctest::Approx(lambda * 0.01).epsilon(1e-12));

    r = snap_target(2.0, lambda);
    CHECK(r.loss == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("parity restriction from particle counts") {
    // one unpaired spin: candidates 1/2, 3/2, ...
    const SnapResult r = snap_target(0.1, lambda, 2, 1);
    CHECK(r.s_star == 0.5);
    CHECK(r.loss == doctest::Approx(lambda * (0.1 - 0.75) * (0.1 - 0.75)).epsilon(1e-12));
    // paired spins: candidates 0, 1, ...
    const SnapResult even = snap_target(0.7, lambda, 2, 2);
    CHECK(even.s_star == 0.0);
  }

  SUBCASE("loss is continuous in the spin expectation") {
    const int n = 10000;
    double prev = snap_target(0.0, 1.0).loss;
    for (int i = 1; i <= n; ++i) {
      const double s2 = 12.0 * i / n;
      const double cur = snap_target(s2, 1.0).loss;
      // |d loss/d s2| <= 2 |s2 - target| <= ~7 on this range
      CHECK(std::fabs(cur - prev) <= 20.0 * (12.0 / n));
      prev = cur;
    }
  }
}

TEST_CASE("snap_ramp") {
  CHECK(snap_ramp(1000.0, 1000.0, 200.0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(snap_ramp(1e9, 1000.0, 200.0) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(snap_ramp(900.0, 1000.0, 200.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(snap_ramp(0.0, 1000.0, 200.0) < 0.01);
}

TEST_CASE("momentum optimizer") {
  SUBCASE("gradient-norm clipping") {
    ParamLayout layout;
    layout.add("p", 2);
    ParamVector params(&layout);
    MomentumOptimizer opt;
    opt.lr0 = 1.0;
    opt.t_decay = 1e18;
    opt.momentum = 0.0;
    opt.grad_clip = 0.1;
    opt.step(params, {3.0, 4.0}, 0.0);
    // norm-5 gradient rescaled to norm 0.1, direction preserved
    CHECK(params[0] == doctest::Approx(-0.06).epsilon(1e-12));
    CHECK(params[1] == doctest::Approx(-0.08).epsilon(1e-12));
  }

  SUBCASE("deterministic quadrature descent is monotone for 500 steps") {
    const HermiteGaussianModel model(1, 2);
    const Harmonic1D ham(1.0);
    ParamVector params = model.eigenstate_params(0.5);
    params.slice("c_state_0")[1] = 0.4;
    params.slice("c_state_0")[2] = -0.2;
    const Matrix beta(1, 1);
    MomentumOptimizer opt;
    opt.lr0 = 0.002;  // below the heavy-ball ringing threshold for this curvature
    const double start = quadrature_energy(model, ham, params, 0);
    double prev = start;
    for (int t = 0; t < 500; ++t) {
      opt.step(params, quadrature_penalty_loss_grad(model, ham, params, beta), t);
      const double e = quadrature_energy(model, ham, params, 0);
      CHECK(e <= prev);
      prev = e;
    }
    CHECK(prev < start - 0.2);
    CHECK(prev < 0.6);
  }
}

TEST_CASE("stochastic penalty gradient tracks the quadrature oracle") {
  const HermiteGaussianModel model(2, 1);
  ParamVector params = model.eigenstate_params(0.5);
  params.slice("c_state_0")[1] = 0.3;   // overlapping, non-orthogonal pair
  params.slice("c_state_1")[0] = 0.4;
  const Harmonic1D ham(1.0);
  const double beta01 = 4.0;
  Matrix beta(2, 2);
  beta(0, 1) = beta01;

  const std::vector<double> oracle = quadrature_penalty_loss_grad(model, ham, params, beta);
  const RatioVector ratios = exact_ratios(model, params);

  std::vector<double> cosines;
  for (int rep = 0; rep < 50; ++rep) {
    const PooledBatch batch =
        hermite_iid_batch(model, params, 512, 500 + static_cast<std::uint64_t>(rep));
    std::vector<double> grad(params.size(), 0.0);
    for (int s = 0; s < 2; ++s) {
      std::vector<Configuration> configs;
      for (const PooledSample& sample : batch.samples)
        if (sample.source_state == s) configs.push_back(sample.config);
      const EnergyGrad eg = energy_and_grad(ham, model, params, s, configs);
      for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += eg.grad[p];
    }
    const double o01 = overlap_msis(batch, ratios)(0, 1);
    add_overlap_pair_grad(model, params, batch, 0, 1, o01, beta01, ratios, grad);
    cosines.push_back(cosine(grad, oracle));
  }
  CHECK(mean(cosines) > 0.9);
}

TEST_CASE("single-state signed overlap agrees with the unsigned form") {
  const HermiteGaussianModel model(2, 1);
  ParamVector params = model.eigenstate_params(0.5);
  params.slice("c_state_1")[0] = 0.5;  // positive true overlap
  const PooledBatch batch = hermite_iid_batch(model, params, 1024, 77);
  const RatioVector ratios = exact_ratios(model, params);
  const double signed_o = overlap_single_state_signed(batch, ratios, 0, 1);
  const SingleStateOverlap unsigned_o = overlap_single_state(batch, 0, 1);
  CHECK(signed_o > 0.0);
  CHECK(std::fabs(signed_o) == doctest::Approx(unsigned_o.value).epsilon(1e-12));
}

TEST_CASE("checkpoint round trip") {
  const HermiteGaussianModel model(2, 2);
  CounterRng rng(7, 0, 0, 0);
  const ParamVector params = model.default_params(rng);
  PenaltySchedule schedule = schedule_with({-0.9, 0.33}, {0.01, 0.07}, 42);
  const std::vector<double> sigmas = {0.8, 1.3};
  const std::vector<std::uint64_t> cursors = {120, 121};

  const std::string text = checkpoint_to_json(17, params, schedule, sigmas, cursors);

  int step = 0;
  ParamVector restored = model.eigenstate_params(0.5);
  PenaltySchedule rsched;
  rsched.init(2);
  std::vector<double> rsigmas;
  std::vector<std::uint64_t> rcursors;
  checkpoint_from_json(text, step, restored, rsched, rsigmas, rcursors);

  CHECK(step == 17);
  REQUIRE(restored.size() == params.size());
  for (std::size_t p = 0; p < params.size(); ++p) CHECK(restored[p] == params[p]);
  CHECK(rsched.ema_energy == schedule.ema_energy);
  CHECK(rsched.ema_sigma == schedule.ema_sigma);
  CHECK(rsched.n_updates == 42);
  CHECK(rsigmas == sigmas);
  CHECK(rcursors == cursors);
}

TEST_CASE("optimize") {
  const Harmonic1D ham(1.0);

  SUBCASE("single state at the exact eigenstate stays flat") {
    const HermiteGaussianModel model(1, 2);
    TrainingOptions options;
    options.steps = 40;
    options.n_walkers_total = 128;
    options.decorr_steps = 5;
    options.trace_every = 5;
    options.checkpoint_every = 20;
    options.seed = 3;
    const TrainResult result = optimize(model, ham, options, model.eigenstate_params(0.5));
    CHECK(result.steps_done == 40);
    CHECK_FALSE(result.nan_abort);
    for (const auto& row : result.energy_trace)
      CHECK(row[2] == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("two-state run separates the spectrum and writes artifacts") {
    const HermiteGaussianModel model(2, 3);
    CounterRng rng(11, 0, 0, 0);
    const ParamVector init = model.default_params(rng);
    const std::string dir = (std::filesystem::temp_directory_path() / "mvmc_train_test").string();
    std::filesystem::remove_all(dir);
    TrainingOptions options;
    options.steps = 400;
    options.n_walkers_total = 256;
    options.decorr_steps = 10;
    options.trace_every = 10;
    options.checkpoint_every = 100;
    options.seed = 5;
    options.output_dir = dir;
    const TrainResult result = optimize(model, ham, options, init);
    CHECK_FALSE(result.nan_abort);
    CHECK_FALSE(result.collapse_flag);
    CHECK(result.energies[0] == doctest::Approx(0.5).epsilon(0.05));
    CHECK(result.energies[1] == doctest::Approx(1.5).epsilon(0.05));
    CHECK(std::fabs(result.overlap(0, 1)) < 0.1);
    // states ordered by energy at the end
    CHECK(result.energies[0] < result.energies[1]);

    std::ifstream energy_csv(dir + "/energy_trace.csv");
    std::string header;
    REQUIRE(energy_csv.good());
    std::getline(energy_csv, header);
    CHECK(header == "step,state,energy,energy_stderr");
    std::ifstream overlap_csv(dir + "/overlap_trace.csv");
    REQUIRE(overlap_csv.good());
    std::getline(overlap_csv, header);
    CHECK(header == "step,s,t,overlap,bhattacharyya,ess");
    CHECK(std::filesystem::exists(dir + "/checkpoint.json"));
    std::filesystem::remove_all(dir);
  }
}
