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
#include <set>

#include "mvmc/grid_sampler.hpp"
#include "mvmc/sampler.hpp"
#include "mvmc/stats.hpp"

using namespace mvmc;

namespace {

Configuration config_1d(double x) {
  Configuration c;
  c.coords = Matrix(1, 1);
  c.coords(0, 0) = x;
  c.n_up = 1;
  return c;
}

/// Uniform density on [0, L]: log|psi| = 0 inside, node outside.
class UniformBoxModel : public WaveFunctionModel {
 public:
  explicit UniformBoxModel(double length) : length_(length) { layout_.add("dummy", 1); }
  int n_states() const override { return 1; }
  int n_particles() const override { return 1; }
  int space_dim() const override { return 1; }
  int n_up() const override { return 1; }
  const ParamLayout& layout() const override { return layout_; }
  SignedLogValue eval(const ParamVector&, int, const Configuration& config) const override {
    const double x = config.coords(0, 0);
    if (x < 0.0 || x > length_) return SignedLogValue::zero();
    return {1, 0.0};
  }
  std::vector<double> grad_log(const ParamVector& p, int, const Configuration&) const override {
    return std::vector<double>(p.size(), 0.0);
  }
  LaplacianLog laplacian_log(const ParamVector&, int, const Configuration&) const override {
    return {};
  }
  void permute_states(ParamVector&, const std::vector<int>&) const override {}
  Configuration initial_config(CounterRng& rng) const override {
    return config_1d(rng.uniform(0.0, length_));
  }
  ParamVector default_params(CounterRng&) const override { return ParamVector(&layout_); }

 private:
  double length_;
  ParamLayout layout_;
};

/// Node everywhere except one point: every proposal is rejected.
class PointMassModel : public UniformBoxModel {
 public:
  PointMassModel() : UniformBoxModel(1.0) {}
  SignedLogValue eval(const ParamVector&, int, const Configuration& config) const override {
    return config.coords(0, 0) == 0.5 ? SignedLogValue{1, 0.0} : SignedLogValue::zero();
  }
};

bool chains_identical(const ChainState& a, const ChainState& b) {
  if (a.walkers.size() != b.walkers.size()) return false;
  for (std::size_t w = 0; w < a.walkers.size(); ++w) {
    const Matrix& ca = a.walkers[w].coords;
    const Matrix& cb = b.walkers[w].coords;
    for (std::size_t i = 0; i < ca.rows(); ++i)
      for (std::size_t d = 0; d < ca.cols(); ++d)
        if (ca(i, d) != cb(i, d)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("mh_step acceptance basics") {
  const UniformBoxModel box(1.0);
  CounterRng init_rng(3, 9, 0, 0);
  const ParamVector params = box.default_params(init_rng);

  SUBCASE("zero log-ratio proposals are always accepted") {
    ChainState chain = init_chain(box, params, 0, 200, 11);
    chain.step_sigma = 0.05;
    // nearly all proposals stay inside the box, where dlog = 0
    mh_step(chain, box, params, 0);
    CHECK(chain.acc_window.back() > 0.8);
  }

  SUBCASE("node proposals are always rejected and walkers stay put") {
    const PointMassModel point;
    ChainState chain;
    chain.seed = 17;
    chain.rng_stream = 1;
    chain.step_sigma = 0.3;
    for (int w = 0; w < 100; ++w) {
      chain.walkers.push_back(config_1d(0.5));
      chain.log_psi.push_back({1, 0.0});
    }
    mh_step(chain, point, params, 0);
    CHECK(chain.acc_window.back() == 0.0);
    for (const Configuration& w : chain.walkers) CHECK(w.coords(0, 0) == 0.5);
  }

  SUBCASE("empirical acceptance matches the analytic proposal overlap") {
    const double length = 1.0;
    const double sigma = 0.5;
    ChainState chain;
    chain.seed = 29;
    chain.rng_stream = 1;
    chain.step_sigma = sigma;
    CounterRng rng(29, 999, 0, 0);
    const int n = 100000;
    for (int w = 0; w < n; ++w) {
      chain.walkers.push_back(config_1d(rng.uniform(0.0, length)));
      chain.log_psi.push_back({1, 0.0});
    }
    mh_step(chain, box, params, 0);
    const double acc = chain.acc_window.back();

    const auto normal_cdf = [](double t) { return 0.5 * (1.0 + std::erf(t / std::sqrt(2.0))); };
    const double expected =
        simpson(
            [&](double x) {
              return normal_cdf((length - x) / sigma) - normal_cdf(-x / sigma);
            },
            0.0, length, 2001) /
        length;
    const double se = std::sqrt(expected * (1.0 - expected) / n);
    CHECK(std::fabs(acc - expected) <= 3.0 * se);
  }
}

TEST_CASE("detailed balance on the oscillator ground state") {
  const HermiteGaussianModel model(1, 2);
  const ParamVector params = model.eigenstate_params(0.5);
  const int n_walkers = 1000;
  const int n_burn = 200;
  const int n_record = 1000;

  ChainState chain = init_chain(model, params, 0, n_walkers, 7);
  for (int t = 0; t < n_burn; ++t) {
    mh_step(chain, model, params, 0);
    adapt_step(chain, 0.525);
  }
  std::vector<double> mean1(n_walkers, 0.0), mean2(n_walkers, 0.0);
  for (int t = 0; t < n_record; ++t) {
    mh_step(chain, model, params, 0);
    for (int w = 0; w < n_walkers; ++w) {
      const double x = chain.walkers[static_cast<std::size_t>(w)].coords(0, 0);
      mean1[static_cast<std::size_t>(w)] += x / n_record;
      mean2[static_cast<std::size_t>(w)] += x * x / n_record;
    }
  }
  // walkers are independent, so the stderr across per-walker means is valid
  const double m1 = mean(mean1);
  const double m2 = mean(mean2);
  CHECK(std::fabs(m1 - 0.0) <= 5.0 * stderr_of_mean(mean1));
  CHECK(std::fabs(m2 - 0.5) <= 5.0 * stderr_of_mean(mean2));
}

TEST_CASE("adapt_step") {
  const HermiteGaussianModel model(1, 2);
  const ParamVector params = model.eigenstate_params(0.5);

  SUBCASE("no-op until the window covers 20 steps") {
    ChainState chain = init_chain(model, params, 0, 8, 5);
    chain.step_sigma = 0.7;
    for (int i = 0; i < 19; ++i) chain.acc_window.push_back(1.0);
    adapt_step(chain, 0.525);
    CHECK(chain.step_sigma == 0.7);
  }

  SUBCASE("acceptance at target leaves the step unchanged") {
    ChainState chain = init_chain(model, params, 0, 8, 5);
    chain.step_sigma = 0.7;
    for (int i = 0; i < 25; ++i) chain.acc_window.push_back(0.525);
    adapt_step(chain, 0.525);
    CHECK(chain.step_sigma == doctest::Approx(0.7).epsilon(1e-15));
  }

  SUBCASE("persistent full acceptance grows the step monotonically") {
    ChainState chain = init_chain(model, params, 0, 8, 5);
    chain.step_sigma = 0.7;
    for (int i = 0; i < 25; ++i) chain.acc_window.push_back(1.0);
    double prev = chain.step_sigma;
    for (int i = 0; i < 10; ++i) {
      adapt_step(chain, 0.525);
      CHECK(chain.step_sigma > prev);
      prev = chain.step_sigma;
    }
  }

  SUBCASE("chain converges to the target acceptance") {
    ChainState chain = init_chain(model, params, 0, 64, 13);
    for (int t = 0; t < 2000; ++t) {
      mh_step(chain, model, params, 0);
      adapt_step(chain, 0.525);
    }
    CHECK(chain.window_acceptance() == doctest::Approx(0.525).epsilon(0.1));
    CHECK(std::fabs(chain.window_acceptance() - 0.525) <= 0.05);
  }
}

TEST_CASE("reproducibility and stream separation") {
  const HermiteGaussianModel model(2, 3);
  CounterRng rng(41, 0, 0, 0);
  const ParamVector params = model.default_params(rng);

  SUBCASE("identical seeds give bit-identical trajectories") {
    ChainState a = init_chain(model, params, 0, 256, 101);
    ChainState b = init_chain(model, params, 0, 256, 101);
    for (int t = 0; t < 50; ++t) {
      mh_step(a, model, params, 0);
      mh_step(b, model, params, 0);
    }
    CHECK(chains_identical(a, b));
  }

  SUBCASE("thread count does not change the trajectory") {
    ChainState a = init_chain(model, params, 0, 256, 101);
    ChainState b = init_chain(model, params, 0, 256, 101);
    for (int t = 0; t < 50; ++t) {
      mh_step(a, model, params, 0, 1);
      mh_step(b, model, params, 0, 4);
    }
    CHECK(chains_identical(a, b));
  }

  SUBCASE("states own distinct RNG streams") {
    const HermiteGaussianModel wide(6, 5);
    const ParamVector wp = wide.eigenstate_params(0.5);
    std::set<std::uint64_t> streams;
    for (int s = 0; s < 6; ++s) streams.insert(init_chain(wide, wp, s, 4, 101).rng_stream);
    CHECK(streams.size() == 6);
  }
}

TEST_CASE("pool_batch") {
  const HermiteGaussianModel model(2, 3);
  const ParamVector params = model.eigenstate_params(0.5);

  SUBCASE("single state pools to the chain itself") {
    const HermiteGaussianModel single(1, 2);
    const ParamVector sp = single.eigenstate_params(0.5);
    ChainState chain = init_chain(single, sp, 0, 32, 3);
    for (int t = 0; t < 10; ++t) mh_step(chain, single, sp, 0);
    const PooledBatch batch = pool_batch({chain}, single, sp);
    REQUIRE(batch.n_states == 1);
    REQUIRE(batch.size() == 32);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      CHECK(batch.samples[i].log_psi_all.size() == 1);
      CHECK(batch.samples[i].config.coords(0, 0) == chain.walkers[i].coords(0, 0));
      CHECK(batch.samples[i].log_psi_all[0].log_abs == chain.log_psi[i].log_abs);
    }
  }

  SUBCASE("identical wave functions give equal rows") {
    HermiteGaussianModel twin(2, 3);
    ParamVector p = twin.eigenstate_params(0.5);
    auto c1 = p.slice("c_state_1");
    const auto c0 = p.slice("c_state_0");
    std::copy(c0.begin(), c0.end(), c1.begin());
    std::vector<ChainState> chains;
    for (int s = 0; s < 2; ++s) {
      chains.push_back(init_chain(twin, p, s, 16, 9));
      for (int t = 0; t < 5; ++t) mh_step(chains.back(), twin, p, s);
    }
    const PooledBatch batch = pool_batch(chains, twin, p);
    for (const PooledSample& sample : batch.samples) {
      CHECK(sample.log_psi_all[0].sign == sample.log_psi_all[1].sign);
      CHECK(sample.log_psi_all[0].log_abs ==
            doctest::Approx(sample.log_psi_all[1].log_abs).epsilon(1e-14));
    }
  }

  SUBCASE("evaluation bookkeeping") {
    std::vector<ChainState> chains;
    for (int s = 0; s < 2; ++s) chains.push_back(init_chain(model, params, s, 24, 9));
    const PooledBatch batch = pool_batch(chains, model, params);
    CHECK(batch.n_states == 2);
    CHECK(batch.counts == std::vector<int>{24, 24});
    CHECK(batch.size() == 48);
    std::size_t evals = 0;
    for (const PooledSample& sample : batch.samples) evals += sample.log_psi_all.size();
    CHECK(evals == 48 * 2);
    for (std::size_t i = 0; i < batch.size(); ++i)
      CHECK(batch.samples[i].source_state == (i < 24 ? 0 : 1));
  }
}
