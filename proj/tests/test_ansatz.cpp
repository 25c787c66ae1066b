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

#include "mvmc/ansatz.hpp"
#include "mvmc/estimators.hpp"

using namespace mvmc;

namespace {

Configuration config_1d(double x) {
  Configuration c;
  c.coords = Matrix(1, 1);
  c.coords(0, 0) = x;
  c.n_up = 1;
  return c;
}

ExcitedPfaffianModel small_pfaffian_model() {
  return ExcitedPfaffianModel(2, 1, 4, {{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}}, 2, 2);
}

std::vector<double> fd_grad_log(const WaveFunctionModel& model, const ParamVector& params,
                                int state, const Configuration& config) {
  std::vector<double> grad(params.size(), 0.0);
  ParamVector probe = params;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double orig = params[p];
    const double h = 1e-5 * std::max(1.0, std::fabs(orig));
    probe[p] = orig + h;
    const SignedLogValue up = model.eval(probe, state, config);
    probe[p] = orig - h;
    const SignedLogValue down = model.eval(probe, state, config);
    probe[p] = orig;
    grad[p] = (up.log_abs - down.log_abs) / (2.0 * h);
  }
  return grad;
}

void check_grad_close(const std::vector<double>& got, const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t p = 0; p < got.size(); ++p) {
    const double tol = 1e-6 * std::max(1.0, std::fabs(want[p])) + 1e-9;
    CHECK(std::fabs(got[p] - want[p]) <= doctest::Approx(tol).epsilon(0.5));
  }
}

// symmetric by construction: psi = exp(-sum |r_i|^2), the antisymmetry
// negative control
class SymmetricMockModel : public WaveFunctionModel {
 public:
  SymmetricMockModel() { layout_.add("dummy", 1); }
  int n_states() const override { return 1; }
  int n_particles() const override { return 2; }
  int space_dim() const override { return 3; }
  int n_up() const override { return 2; }
  const ParamLayout& layout() const override { return layout_; }
  SignedLogValue eval(const ParamVector&, int, const Configuration& config) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < config.coords.rows(); ++i)
      for (std::size_t d = 0; d < config.coords.cols(); ++d)
        s += config.coords(i, d) * config.coords(i, d);
    return {1, -s};
  }
  std::vector<double> grad_log(const ParamVector& params, int, const Configuration&) const override {
    return std::vector<double>(params.size(), 0.0);
  }
  LaplacianLog laplacian_log(const ParamVector&, int, const Configuration&) const override {
    return {};
  }
  void permute_states(ParamVector&, const std::vector<int>&) const override {}
  Configuration initial_config(CounterRng& rng) const override {
    Configuration c;
    c.coords = Matrix(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t d = 0; d < 3; ++d) c.coords(i, d) = rng.normal();
    c.n_up = 2;
    return c;
  }
  ParamVector default_params(CounterRng&) const override { return ParamVector(&layout_); }

 private:
  ParamLayout layout_;
};

}  // namespace

TEST_CASE("Hermite eval spec examples") {
  const HermiteGaussianModel model(2, 3);
  const ParamVector params = model.eigenstate_params(0.5);

  const SignedLogValue ground = model.eval(params, 0, config_1d(0.0));
  CHECK(ground.sign == 1);
  CHECK(ground.log_abs == doctest::Approx(0.0).epsilon(1e-14));

  const SignedLogValue excited = model.eval(params, 1, config_1d(0.0));
  CHECK(excited.sign == 0);

  // value matches the closed form H_1(z) e^{-x^2/2} = 2 z e^{-x^2/2}
  const double x = 0.7;
  const SignedLogValue v = model.eval(params, 1, config_1d(x));
  const double want = 2.0 * x * std::exp(-0.5 * x * x);
  CHECK(v.value() == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("Hermite grad_log") {
  const HermiteGaussianModel model(2, 3);

  SUBCASE("single coefficient is log-linear") {
    ParamVector params = model.eigenstate_params(0.5);
    params.slice("c_state_0")[0] = 1.7;
    const std::vector<double> g = model.grad_log(params, 0, config_1d(0.3));
    const ParamSlice& c0 = model.layout().slice("c_state_0");
    CHECK(g[c0.offset] == doctest::Approx(1.0 / 1.7).epsilon(1e-12));
  }

  SUBCASE("matches finite differences at random configurations") {
    CounterRng rng(21, 1, 0, 0);
    ParamVector params = model.eigenstate_params(0.6);
    for (int s = 0; s < 2; ++s)
      for (double& c : params.slice("c_state_" + std::to_string(s))) c += 0.2 * rng.normal();
    for (int rep = 0; rep < 10; ++rep) {
      const Configuration config = config_1d(rng.uniform(-2.0, 2.0));
      for (int s = 0; s < 2; ++s) {
        if (model.eval(params, s, config).sign == 0) continue;
        check_grad_close(model.grad_log(params, s, config), fd_grad_log(model, params, s, config));
      }
    }
  }

  SUBCASE("slices of other states are exactly zero") {
    const ParamVector params = model.eigenstate_params(0.5);
    const std::vector<double> g = model.grad_log(params, 0, config_1d(0.4));
    const ParamSlice& c1 = model.layout().slice("c_state_1");
    for (std::size_t k = 0; k < c1.size; ++k) CHECK(g[c1.offset + k] == 0.0);
  }

  SUBCASE("node evaluation throws") {
    const ParamVector params = model.eigenstate_params(0.5);
    CHECK_THROWS_AS(model.grad_log(params, 1, config_1d(0.0)), NodeError);
  }
}

TEST_CASE("Hermite laplacian and local energy") {
  const HermiteGaussianModel model(3, 2);
  const ParamVector params = model.eigenstate_params(0.5);
  const Harmonic1D ham(1.0);

  SUBCASE("ground state closed form") {
    for (double x : {-1.3, 0.0, 0.2, 2.5}) {
      const LaplacianLog l = model.laplacian_log(params, 0, config_1d(x));
      CHECK(l.lap == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(l.grad_sq == doctest::Approx(x * x).epsilon(1e-12));
      CHECK(local_energy(ham, model, params, 0, config_1d(x)) ==
            doctest::Approx(0.5).epsilon(1e-12));
    }
  }

  SUBCASE("eigenstates have constant local energy n + 1/2") {
    CounterRng rng(33, 2, 0, 0);
    for (int n = 0; n < 3; ++n) {
      std::vector<double> es;
      for (int rep = 0; rep < 200; ++rep) {
        const double x = rng.uniform(-3.0, 3.0);
        if (model.eval(params, n, config_1d(x)).sign == 0) continue;
        es.push_back(local_energy(ham, model, params, n, config_1d(x)));
      }
      double var = 0.0;
      for (double e : es) var += (e - (n + 0.5)) * (e - (n + 0.5));
      var /= static_cast<double>(es.size());
      CHECK(var < 1e-20);
    }
  }

  SUBCASE("perturbed coefficients lie above the ground state energy") {
    ParamVector p = model.eigenstate_params(0.5);
    p.slice("c_state_0")[1] = 0.2;
    // Rayleigh quotient by direct sum over a grid
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = -6.0 + 12.0 * i / 400.0;
      const SignedLogValue v = model.eval(p, 0, config_1d(x));
      if (v.sign == 0) continue;
      const double w = std::exp(2.0 * v.log_abs);
      num += w * local_energy(ham, model, p, 0, config_1d(x));
      den += w;
    }
    CHECK(num / den >= 0.5);
  }
}

TEST_CASE("Excited Pfaffian antisymmetry") {
  const ExcitedPfaffianModel model = small_pfaffian_model();
  CounterRng rng(55, 3, 0, 0);
  const ParamVector params = model.default_params(rng);

  SUBCASE("100 random configurations, all same-spin swaps") {
    for (int rep = 0; rep < 100; ++rep) {
      const Configuration config = model.initial_config(rng);
      for (int s = 0; s < model.n_states(); ++s) {
        CHECK(antisymmetry_check(model, params, s, config, 0, 1));
        CHECK(antisymmetry_check(model, params, s, config, 2, 3));
      }
    }
  }

  SUBCASE("coincident same-spin particles sit on a node") {
    Configuration config = model.initial_config(rng);
    for (std::size_t d = 0; d < 3; ++d) config.coords(1, d) = config.coords(0, d);
    CHECK(model.eval(params, 0, config).sign == 0);
  }

  SUBCASE("symmetrized mock fails the check") {
    const SymmetricMockModel mock;
    CounterRng mrng(5, 1, 0, 0);
    const ParamVector p = mock.default_params(mrng);
    const Configuration config = mock.initial_config(mrng);
    CHECK_FALSE(antisymmetry_check(mock, p, 0, config, 0, 1));
  }
}

TEST_CASE("Pfaffian ansatz reduces to a determinant for canonical pairing") {
  // n_det = 1, n_orb = n_particles, A = canonical pairing: psi equals
  // det(Phi) times the constant Pf(A), so the ratio is config-independent
  const ExcitedPfaffianModel model(1, 1, 4, {{0.0, 0.0, 0.0}}, 2, 2);
  CounterRng rng(77, 4, 0, 0);
  ParamVector params = model.default_params(rng);
  SkewMatrix canonical(4);
  canonical.upper(0, 1) = 1.0;
  canonical.upper(2, 3) = 1.0;
  model.set_antisymmetrizer(params, 0, 0, canonical);

  double ratio = 0.0;
  bool first = true;
  for (int rep = 0; rep < 20; ++rep) {
    const Configuration config = model.initial_config(rng);
    const SignedLogValue psi = model.eval(params, 0, config);
    const LogDet det = log_det(model.orbital_matrix(params, config, 0));
    if (psi.sign == 0 || det.sign == 0) continue;
    const double r = psi.log_abs - det.log_abs;
    if (first) {
      ratio = r;
      first = false;
    } else {
      CHECK(r == doctest::Approx(ratio).epsilon(1e-9));
    }
    CHECK(psi.sign == det.sign);  // Pf of canonical pairing is +1
  }
  REQUIRE_FALSE(first);
}

TEST_CASE("Excited Pfaffian grad_log matches finite differences") {
  const ExcitedPfaffianModel model = small_pfaffian_model();
  CounterRng rng(91, 5, 0, 0);
  const ParamVector params = model.default_params(rng);
  int checked = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const Configuration config = model.initial_config(rng);
    for (int s = 0; s < model.n_states(); ++s) {
      if (model.eval(params, s, config).sign == 0) continue;
      check_grad_close(model.grad_log(params, s, config), fd_grad_log(model, params, s, config));
      ++checked;
    }
  }
  CHECK(checked >= 15);
}

TEST_CASE("Excited Pfaffian grad_log state isolation") {
  const ExcitedPfaffianModel model = small_pfaffian_model();
  CounterRng rng(93, 6, 0, 0);
  const ParamVector params = model.default_params(rng);
  const Configuration config = model.initial_config(rng);
  const std::vector<double> g = model.grad_log(params, 0, config);
  const ParamSlice& other = model.layout().slice(ExcitedPfaffianModel::a_slice_name(1));
  for (std::size_t k = 0; k < other.size; ++k) CHECK(g[other.offset + k] == 0.0);
}

TEST_CASE("Excited Pfaffian Laplacian step-halving consistency") {
  const ExcitedPfaffianModel model = small_pfaffian_model();
  CounterRng rng(101, 7, 0, 0);
  const ParamVector params = model.default_params(rng);
  const double h = model.fd_step();

  auto fd_lap = [&](const Configuration& config, double step) {
    const SignedLogValue center = model.eval(params, 0, config);
    double lap = 0.0;
    Configuration c = config;
    for (int i = 0; i < config.n_particles(); ++i)
      for (int d = 0; d < 3; ++d) {
        const double x0 = config.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d));
        c.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) = x0 + step;
        const double up = model.eval(params, 0, c).log_abs;
        c.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) = x0 - step;
        const double down = model.eval(params, 0, c).log_abs;
        c.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) = x0;
        lap += (up - 2.0 * center.log_abs + down) / (step * step);
      }
    return lap;
  };

  int checked = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const Configuration config = model.initial_config(rng);
    if (model.eval(params, 0, config).sign == 0) continue;
    const double full = fd_lap(config, h);
    const double half = fd_lap(config, 0.5 * h);
    // truncation is O(h^2) but roundoff in the second difference dominates
    CHECK(std::fabs(full - half) <= 1e-3 * std::max(1.0, std::fabs(full)));
    const LaplacianLog l = model.laplacian_log(params, 0, config);
    CHECK(l.lap == doctest::Approx(full).epsilon(1e-10));
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("permute_states relabels wave functions consistently") {
  const ExcitedPfaffianModel model = small_pfaffian_model();
  CounterRng rng(111, 8, 0, 0);
  const ParamVector params = model.default_params(rng);
  ParamVector permuted = params;
  const std::vector<int> perm = {1, 0};
  model.permute_states(permuted, perm);
  for (int rep = 0; rep < 5; ++rep) {
    const Configuration config = model.initial_config(rng);
    for (int s = 0; s < 2; ++s) {
      const SignedLogValue before = model.eval(params, perm[static_cast<std::size_t>(s)], config);
      const SignedLogValue after = model.eval(permuted, s, config);
      CHECK(before.sign == after.sign);
      CHECK(before.log_abs == doctest::Approx(after.log_abs).epsilon(1e-12));
    }
  }
}
