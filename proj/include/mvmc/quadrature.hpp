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
#include "mvmc/grid_sampler.hpp"

namespace mvmc {

/// Deterministic 1-D quadrature references for the analytic model family.
/// These are test oracles, not estimators: Simpson integration on [lo, hi].

double quadrature_norm_sq(const WaveFunctionModel& model, const ParamVector& params, int state,
                          double lo = -8.0, double hi = 8.0, int n_points = 2001);

/// Rayleigh quotient E[psi_state] = int psi^2 E_loc / int psi^2.
double quadrature_energy(const WaveFunctionModel& model, const Hamiltonian& ham,
                         const ParamVector& params, int state, double lo = -8.0, double hi = 8.0,
                         int n_points = 2001);

/// Normalized overlap <Psi_s|Psi_t>.
double quadrature_overlap(const WaveFunctionModel& model, const ParamVector& params, int s, int t,
                          double lo = -8.0, double hi = 8.0, int n_points = 2001);

/// Normalized unsigned overlap int |Psi_s||Psi_t|.
double quadrature_bhattacharyya(const WaveFunctionModel& model, const ParamVector& params, int s,
                                int t, double lo = -8.0, double hi = 8.0, int n_points = 2001);

/// Full penalty loss sum_s E_s + sum_{s<t} beta_st S_st^2 by quadrature.
double quadrature_penalty_loss(const WaveFunctionModel& model, const Hamiltonian& ham,
                               const ParamVector& params, const Matrix& beta, double lo = -8.0,
                               double hi = 8.0, int n_points = 2001);

/// Central finite-difference gradient of the penalty objective. The energy
/// sum is differentiated fully; each beta_st S_st^2 term is differentiated
/// only through the higher state t, with the lower state s held constant,
/// mirroring the training rule that a pair's penalty pushes only the
/// higher state.
std::vector<double> quadrature_penalty_loss_grad(const WaveFunctionModel& model,
                                                 const Hamiltonian& ham, const ParamVector& params,
                                                 const Matrix& beta, double h = 1e-5,
                                                 double lo = -8.0, double hi = 8.0,
                                                 int n_points = 2001);

}  // namespace mvmc
