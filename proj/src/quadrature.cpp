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

#include "mvmc/quadrature.hpp"

#include <cmath>

namespace mvmc {

namespace {

Configuration config_1d(double x) {
  Configuration c;
  c.coords = Matrix(1, 1);
  c.coords(0, 0) = x;
  c.n_up = 1;
  return c;
}

double psi_value(const WaveFunctionModel& model, const ParamVector& params, int state, double x) {
  const SignedLogValue v = model.eval(params, state, config_1d(x));
  return v.value();
}

}  // namespace

double quadrature_norm_sq(const WaveFunctionModel& model, const ParamVector& params, int state,
                          double lo, double hi, int n_points) {
  return simpson(
      [&](double x) {
        const double p = psi_value(model, params, state, x);
        return p * p;
      },
      lo, hi, n_points);
}

double quadrature_energy(const WaveFunctionModel& model, const Hamiltonian& ham,
                         const ParamVector& params, int state, double lo, double hi,
                         int n_points) {
  const double num = simpson(
      [&](double x) {
        const Configuration c = config_1d(x);
        const SignedLogValue v = model.eval(params, state, c);
        if (v.sign == 0) return 0.0;
        const double p = v.value();
        return p * p * local_energy(ham, model, params, state, c);
      },
      lo, hi, n_points);
  return num / quadrature_norm_sq(model, params, state, lo, hi, n_points);
}

double quadrature_overlap(const WaveFunctionModel& model, const ParamVector& params, int s, int t,
                          double lo, double hi, int n_points) {
  const double cross = simpson(
      [&](double x) { return psi_value(model, params, s, x) * psi_value(model, params, t, x); },
      lo, hi, n_points);
  return cross / std::sqrt(quadrature_norm_sq(model, params, s, lo, hi, n_points) *
                           quadrature_norm_sq(model, params, t, lo, hi, n_points));
}

double quadrature_bhattacharyya(const WaveFunctionModel& model, const ParamVector& params, int s,
                                int t, double lo, double hi, int n_points) {
  const double cross = simpson(
      [&](double x) {
        return std::fabs(psi_value(model, params, s, x) * psi_value(model, params, t, x));
      },
      lo, hi, n_points);
  return cross / std::sqrt(quadrature_norm_sq(model, params, s, lo, hi, n_points) *
                           quadrature_norm_sq(model, params, t, lo, hi, n_points));
}

double quadrature_penalty_loss(const WaveFunctionModel& model, const Hamiltonian& ham,
                               const ParamVector& params, const Matrix& beta, double lo,
                               double hi, int n_points) {
  double loss = 0.0;
  const int n = model.n_states();
  for (int s = 0; s < n; ++s) loss += quadrature_energy(model, ham, params, s, lo, hi, n_points);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      const double w = beta(static_cast<std::size_t>(s), static_cast<std::size_t>(t));
      if (w == 0.0) continue;
      const double ov = quadrature_overlap(model, params, s, t, lo, hi, n_points);
      loss += w * ov * ov;
    }
  return loss;
}

std::vector<double> quadrature_penalty_loss_grad(const WaveFunctionModel& model,
                                                 const Hamiltonian& ham, const ParamVector& params,
                                                 const Matrix& beta, double h, double lo,
                                                 double hi, int n_points) {
  const int n = model.n_states();
  // Overlap with the s side frozen at the base parameters and the t side
  // evaluated at probe, matching the training rule that only the higher
  // state of a penalized pair responds to the overlap term.
  const auto overlap_t_side = [&](const ParamVector& probe, int s, int t) {
    const double cross = simpson(
        [&](double x) {
          return psi_value(model, params, s, x) * psi_value(model, probe, t, x);
        },
        lo, hi, n_points);
    return cross / std::sqrt(quadrature_norm_sq(model, params, s, lo, hi, n_points) *
                             quadrature_norm_sq(model, probe, t, lo, hi, n_points));
  };
  std::vector<double> grad(params.size(), 0.0);
  ParamVector probe = params;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double orig = params[p];
    const double hp = h * std::max(1.0, std::fabs(orig));
    double up = 0.0;
    double down = 0.0;
    probe[p] = orig + hp;
    for (int s = 0; s < n; ++s) up += quadrature_energy(model, ham, probe, s, lo, hi, n_points);
    probe[p] = orig - hp;
    for (int s = 0; s < n; ++s) down += quadrature_energy(model, ham, probe, s, lo, hi, n_points);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        const double w = beta(static_cast<std::size_t>(s), static_cast<std::size_t>(t));
        if (w == 0.0) continue;
        probe[p] = orig + hp;
        const double ou = overlap_t_side(probe, s, t);
        probe[p] = orig - hp;
        const double od = overlap_t_side(probe, s, t);
        up += w * ou * ou;
        down += w * od * od;
      }
    probe[p] = orig;
    grad[p] = (up - down) / (2.0 * hp);
  }
  return grad;
}

}  // namespace mvmc
