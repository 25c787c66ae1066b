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

#include "mvmc/grid_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mvmc {

double simpson(const std::function<double(double)>& f, double lo, double hi, int n_points) {
  if (n_points < 3 || n_points % 2 == 0)
    throw std::invalid_argument("simpson: n_points must be odd and >= 3");
  const double h = (hi - lo) / static_cast<double>(n_points - 1);
  double s = f(lo) + f(hi);
  for (int i = 1; i < n_points - 1; ++i) s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

GridSampler1D::GridSampler1D(const std::function<double(double)>& density, double lo, double hi,
                             int n_points) {
  if (n_points < 2) throw std::invalid_argument("GridSampler1D: need >= 2 points");
  grid_.resize(static_cast<std::size_t>(n_points));
  cdf_.resize(static_cast<std::size_t>(n_points));
  const double h = (hi - lo) / static_cast<double>(n_points - 1);
  std::vector<double> dens(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    grid_[static_cast<std::size_t>(i)] = lo + i * h;
    dens[static_cast<std::size_t>(i)] = density(grid_[static_cast<std::size_t>(i)]);
    if (dens[static_cast<std::size_t>(i)] < 0.0)
      throw std::invalid_argument("GridSampler1D: negative density");
  }
  cdf_[0] = 0.0;
  for (int i = 1; i < n_points; ++i)
    cdf_[static_cast<std::size_t>(i)] = cdf_[static_cast<std::size_t>(i - 1)] +
        0.5 * h * (dens[static_cast<std::size_t>(i - 1)] + dens[static_cast<std::size_t>(i)]);
  normalizer_ = cdf_.back();
  if (normalizer_ <= 0.0) throw std::invalid_argument("GridSampler1D: zero total mass");
  for (double& c : cdf_) c /= normalizer_;
  cdf_.back() = 1.0;
}

double GridSampler1D::sample(CounterRng& rng) const {
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t hi = std::min<std::size_t>(
      static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cdf_.begin())), cdf_.size() - 1);
  const std::size_t lo = hi - 1;
  const double seg = cdf_[hi] - cdf_[lo];
  const double frac = seg > 0.0 ? (u - cdf_[lo]) / seg : 0.5;
  return grid_[lo] + frac * (grid_[hi] - grid_[lo]);
}

}  // namespace mvmc
