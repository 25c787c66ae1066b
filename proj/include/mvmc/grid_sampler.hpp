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

#include <functional>
#include <vector>

#include "mvmc/rng.hpp"

namespace mvmc {

/// Tabulated inverse-CDF sampler for a 1-D unnormalized density. Draws are
/// i.i.d., which the variance benchmarks need (Markov-chain autocorrelation
/// would contaminate the theoretical bounds).
class GridSampler1D {
 public:
  GridSampler1D(const std::function<double(double)>& density, double lo, double hi,
                int n_points = 4001);

  double sample(CounterRng& rng) const;
  double normalizer() const { return normalizer_; }

 private:
  std::vector<double> grid_;
  std::vector<double> cdf_;  // normalized, cdf_.front() == 0, cdf_.back() == 1
  double normalizer_;
};

/// Composite Simpson integral of f over [lo, hi]; n_points must be odd.
double simpson(const std::function<double(double)>& f, double lo, double hi, int n_points);

}  // namespace mvmc
