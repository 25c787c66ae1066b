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

#include <cmath>
#include <limits>
#include <vector>

namespace mvmc {

/// A real value stored as sign * exp(log_abs). Zero is sign == 0 with
/// log_abs == -inf, so nodal evaluations compose without special cases.
struct SignedLogValue {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  static SignedLogValue zero() { return {}; }
  static SignedLogValue one() { return {1, 0.0}; }

  static SignedLogValue from_value(double v) {
    if (v == 0.0) return zero();
    return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
  }

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  bool is_zero() const { return sign == 0; }

  SignedLogValue operator*(const SignedLogValue& rhs) const {
    if (sign == 0 || rhs.sign == 0) return zero();
    return {sign * rhs.sign, log_abs + rhs.log_abs};
  }
  SignedLogValue operator/(const SignedLogValue& rhs) const {
    if (rhs.sign == 0) return {0, std::numeric_limits<double>::quiet_NaN()};
    if (sign == 0) return zero();
    return {sign * rhs.sign, log_abs - rhs.log_abs};
  }
};

/// Max-shifted signed log-sum of terms. Exact cancellation yields sign 0.
inline SignedLogValue signed_log_sum(const std::vector<SignedLogValue>& terms) {
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (t.sign != 0 && t.log_abs > shift) shift = t.log_abs;
  if (!std::isfinite(shift)) return SignedLogValue::zero();
  double acc = 0.0;
  for (const auto& t : terms)
    if (t.sign != 0) acc += t.sign * std::exp(t.log_abs - shift);
  if (acc == 0.0) return SignedLogValue::zero();
  return {acc > 0.0 ? 1 : -1, shift + std::log(std::abs(acc))};
}

}  // namespace mvmc
