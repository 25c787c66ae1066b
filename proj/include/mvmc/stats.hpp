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

#include <vector>

namespace mvmc {

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // unbiased, needs >= 2 entries
double stderr_of_mean(const std::vector<double>& xs);
double median(std::vector<double> xs);

/// Linear-interpolation percentile, p in [0, 100].
double percentile(std::vector<double> xs, double p);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p_two_sided = 1.0;
  double p_greater = 1.0;  // P(mean_a > mean_b) rejected at this level
};

/// Welch's unequal-variance t-test for the difference of two means.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Regularized incomplete beta function I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

}  // namespace mvmc
