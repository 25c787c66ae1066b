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

#include "mvmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mvmc/stats.hpp"
#include "json.hpp"

namespace mvmc {

double local_energy(const Hamiltonian& ham, const WaveFunctionModel& model,
                    const ParamVector& params, int state, const Configuration& config) {
  const LaplacianLog l = model.laplacian_log(params, state, config);
  return -0.5 * (l.lap + l.grad_sq) + ham.potential(config);
}

EnergyGrad energy_and_grad(const Hamiltonian& ham, const WaveFunctionModel& model,
                           const ParamVector& params, int state,
                           const std::vector<Configuration>& configs) {
  std::vector<double> e_loc;
  std::vector<std::vector<double>> scores;
  int skipped = 0;
  for (const Configuration& c : configs) {
    try {
      const double e = local_energy(ham, model, params, state, c);
      if (!std::isfinite(e)) throw NodeError("non-finite local energy");
      scores.push_back(model.grad_log(params, state, c));
      e_loc.push_back(e);
    } catch (const NodeError&) {
      ++skipped;
    }
  }
  if (e_loc.empty()) throw EvalError("energy_and_grad: all samples node-flagged");

  const double med = median(e_loc);
  std::vector<double> dev;
  dev.reserve(e_loc.size());
  for (double e : e_loc) dev.push_back(std::fabs(e - med));
  const double width = 5.0 * percentile(dev, 95.0);
  for (double& e : e_loc) e = std::clamp(e, med - width, med + width);

  EnergyGrad out;
  out.n_used = static_cast<int>(e_loc.size());
  out.n_skipped = skipped;
  out.energy = mean(e_loc);
  if (e_loc.size() >= 2) {
    out.sigma = std::sqrt(variance(e_loc));
    out.stderr_ = out.sigma / std::sqrt(static_cast<double>(e_loc.size()));
  }
  out.grad.assign(params.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(e_loc.size());
  for (std::size_t i = 0; i < e_loc.size(); ++i) {
    const double w = 2.0 * (e_loc[i] - out.energy) * inv_n;
    for (std::size_t p = 0; p < out.grad.size(); ++p) out.grad[p] += w * scores[i][p];
  }
  return out;
}

namespace {

constexpr double kLogRatioClamp = 50.0;

double clamped_ratio(const SignedLogValue& num, const SignedLogValue& den, int* n_clamped) {
  if (den.sign == 0) {
    ++*n_clamped;
    return 0.0;
  }
  if (num.sign == 0) return 0.0;
  double dlog = num.log_abs - den.log_abs;
  if (std::fabs(dlog) > kLogRatioClamp) {
    dlog = std::clamp(dlog, -kLogRatioClamp, kLogRatioClamp);
    ++*n_clamped;
  }
  return num.sign * den.sign * std::exp(dlog);
}

/// log of sum_u psi_u(x)^2 r_u for one pooled sample.
double log_mixture_mass(const PooledSample& sample, const RatioVector& ratios) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < sample.log_psi_all.size(); ++u) {
    if (sample.log_psi_all[u].sign == 0) continue;
    m = std::max(m, 2.0 * sample.log_psi_all[u].log_abs + std::log(ratios.r[u]));
  }
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t u = 0; u < sample.log_psi_all.size(); ++u) {
    if (sample.log_psi_all[u].sign == 0) continue;
    s += std::exp(2.0 * sample.log_psi_all[u].log_abs + std::log(ratios.r[u]) - m);
  }
  return m + std::log(s);
}

double msis_integrand_impl(const PooledSample& sample, const RatioVector& num_ratios,
                           const RatioVector& den_ratios, int s, int t) {
  const SignedLogValue& ps = sample.log_psi_all[static_cast<std::size_t>(s)];
  const SignedLogValue& pt = sample.log_psi_all[static_cast<std::size_t>(t)];
  if (ps.sign == 0 || pt.sign == 0) return 0.0;
  const double log_den = log_mixture_mass(sample, den_ratios);
  if (!std::isfinite(log_den)) return 0.0;
  const int n_states = static_cast<int>(sample.log_psi_all.size());
  const double log_num = ps.log_abs + pt.log_abs +
                         0.5 * (std::log(num_ratios.r[static_cast<std::size_t>(s)]) +
                                std::log(num_ratios.r[static_cast<std::size_t>(t)])) +
                         std::log(static_cast<double>(n_states));
  return ps.sign * pt.sign * std::exp(log_num - log_den);
}

}  // namespace

double msis_integrand(const PooledSample& sample, const RatioVector& ratios, int s, int t) {
  return msis_integrand_impl(sample, ratios, ratios, s, t);
}

SingleStateOverlap overlap_single_state(const PooledBatch& pooled, int s, int t) {
  SingleStateOverlap out;
  double sum_st = 0.0, sum_ts = 0.0;
  int n_s = 0, n_t = 0;
  for (const PooledSample& sample : pooled.samples) {
    const SignedLogValue& ps = sample.log_psi_all[static_cast<std::size_t>(s)];
    const SignedLogValue& pt = sample.log_psi_all[static_cast<std::size_t>(t)];
    if (sample.source_state == s) {
      sum_st += clamped_ratio(pt, ps, &out.n_clamped);
      ++n_s;
    } else if (sample.source_state == t) {
      sum_ts += clamped_ratio(ps, pt, &out.n_clamped);
      ++n_t;
    }
  }
  if (n_s < 2 || n_t < 2) throw EvalError("overlap_single_state: need >= 2 samples per state");
  const double prod = (sum_st / n_s) * (sum_ts / n_t);
  out.value = std::sqrt(std::max(0.0, prod));
  return out;
}

Matrix overlap_msis_with_denominator(const PooledBatch& pooled, const RatioVector& ratios,
                                     const RatioVector& den_ratios) {
  const int n = pooled.n_states;
  Matrix out(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  const double bound = 0.5 * n + 1e-9;
  for (int s = 0; s < n; ++s) {
    out(static_cast<std::size_t>(s), static_cast<std::size_t>(s)) = 1.0;
    for (int t = s + 1; t < n; ++t) {
      double sum = 0.0;
      for (const PooledSample& sample : pooled.samples) {
        const double f = msis_integrand_impl(sample, ratios, den_ratios, s, t);
        if (std::fabs(f) > bound) {
          std::ostringstream msg;
          msg << "overlap_msis: |f_" << s << t << "| = " << std::fabs(f)
              << " exceeds the AM-GM bound " << 0.5 * n;
          throw InternalConsistencyError(msg.str());
        }
        sum += f;
      }
      const double v = sum / static_cast<double>(pooled.size());
      out(static_cast<std::size_t>(s), static_cast<std::size_t>(t)) = v;
      out(static_cast<std::size_t>(t), static_cast<std::size_t>(s)) = v;
    }
  }
  return out;
}

Matrix overlap_msis(const PooledBatch& pooled, const RatioVector& ratios) {
  return overlap_msis_with_denominator(pooled, ratios, ratios);
}

Matrix bhattacharyya(const PooledBatch& pooled, const RatioVector& ratios) {
  const int n = pooled.n_states;
  Matrix out(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    out(static_cast<std::size_t>(s), static_cast<std::size_t>(s)) = 1.0;
    for (int t = s + 1; t < n; ++t) {
      double sum = 0.0;
      for (const PooledSample& sample : pooled.samples)
        sum += std::fabs(msis_integrand(sample, ratios, s, t));
      const double v = sum / static_cast<double>(pooled.size());
      out(static_cast<std::size_t>(s), static_cast<std::size_t>(t)) = v;
      out(static_cast<std::size_t>(t), static_cast<std::size_t>(s)) = v;
    }
  }
  return out;
}

BridgeResult bridge_ratios(const PooledBatch& pooled, int iters, double clip) {
  const int n = pooled.n_states;
  BridgeResult out;
  out.ratios = RatioVector::ones(n);
  if (n == 1) {
    out.converged = true;
    return out;
  }
  const std::size_t sn = static_cast<std::size_t>(n);
  for (int it = 0; it < iters; ++it) {
    // M(s, t) = mean over samples of state s of responsibility R_t; rows of M
    // sum to 1 so M is a stochastic matrix whose stationary weights encode
    // the normalizer mismatch of the current ratios.
    Matrix m(sn, sn);
    std::vector<int> counts(sn, 0);
    for (const PooledSample& sample : pooled.samples) {
      const double log_mass = log_mixture_mass(sample, out.ratios);
      if (!std::isfinite(log_mass)) continue;
      const std::size_t src = static_cast<std::size_t>(sample.source_state);
      ++counts[src];
      for (std::size_t t = 0; t < sn; ++t) {
        if (sample.log_psi_all[t].sign == 0) continue;
        m(src, t) += std::exp(2.0 * sample.log_psi_all[t].log_abs + std::log(out.ratios.r[t]) -
                              log_mass);
      }
    }
    for (std::size_t s = 0; s < sn; ++s) {
      if (counts[s] == 0) throw EvalError("bridge_ratios: state without usable samples");
      for (std::size_t t = 0; t < sn; ++t) m(s, t) /= static_cast<double>(counts[s]);
    }

    // Stationary weights y with y^T M = y^T, normalized by sum = 1: replace
    // the last balance equation with the normalization row.
    Matrix a(sn, sn);
    std::vector<double> b(sn, 0.0);
    for (std::size_t row = 0; row + 1 < sn; ++row) {
      for (std::size_t u = 0; u < sn; ++u) a(row, u) = m(u, row) - (u == row ? 1.0 : 0.0);
    }
    for (std::size_t u = 0; u < sn; ++u) a(sn - 1, u) = 1.0;
    b[sn - 1] = 1.0;
    std::vector<double> y;
    try {
      y = solve_linear(a, b);
    } catch (const std::exception&) {
      out.singular = true;
      for (std::size_t u = 0; u < sn; ++u) a(u, u) += 1e-10;
      y = solve_linear(a, b);
    }
    bool bad = false;
    for (double v : y)
      if (!(v > 0.0) || !std::isfinite(v)) bad = true;
    if (bad) {
      out.singular = true;
      out.residual = std::numeric_limits<double>::infinity();
      break;
    }

    double residual = 0.0;
    std::vector<double> next(sn);
    const double scale = y[0] / out.ratios.r[0];
    for (std::size_t s = 0; s < sn; ++s) {
      double proposed = out.ratios.r[s] * scale / y[s];
      proposed = std::clamp(proposed, out.ratios.r[s] / clip, out.ratios.r[s] * clip);
      residual = std::max(residual, std::fabs(proposed - out.ratios.r[s]) / out.ratios.r[s]);
      next[s] = proposed;
    }
    next[0] = 1.0;
    out.ratios.r = next;
    out.residual = residual;
  }
  out.converged = out.residual <= 1e-3;
  return out;
}

EssResult kish_ess(const PooledBatch& pooled, const RatioVector& ratios, int state) {
  double sum_w = 0.0, sum_w2 = 0.0;
  for (const PooledSample& sample : pooled.samples) {
    const SignedLogValue& ps = sample.log_psi_all[static_cast<std::size_t>(state)];
    const double log_mass = log_mixture_mass(sample, ratios);
    if (ps.sign == 0 || !std::isfinite(log_mass)) continue;
    // w = q_s r_s / qbar with qbar the equal-weight mixture of q_u r_u.
    const double w = static_cast<double>(pooled.n_states) *
                     std::exp(2.0 * ps.log_abs +
                              std::log(ratios.r[static_cast<std::size_t>(state)]) - log_mass);
    sum_w += w;
    sum_w2 += w * w;
  }
  EssResult out;
  if (sum_w2 == 0.0) return out;
  out.ess = sum_w * sum_w / sum_w2;
  out.normalized = out.ess * static_cast<double>(pooled.n_states) /
                   static_cast<double>(pooled.size());
  return out;
}

OverlapReport overlap_report(const PooledBatch& pooled, int bridge_iters, double bridge_clip) {
  OverlapReport report;
  BridgeResult bridge = bridge_ratios(pooled, bridge_iters, bridge_clip);
  report.ratios = bridge.ratios;
  report.fixed_point_residual = bridge.residual;
  report.bridge_converged = bridge.converged;
  report.s_hat = overlap_msis(pooled, report.ratios);
  report.f_hat = bhattacharyya(pooled, report.ratios);
  for (int s = 0; s < pooled.n_states; ++s) {
    const EssResult e = kish_ess(pooled, report.ratios, s);
    report.ess.push_back(e.ess);
    report.ess_normalized.push_back(e.normalized);
  }
  return report;
}

std::string OverlapReport::to_json() const {
  nlohmann::json j;
  auto matrix_rows = [](const Matrix& m) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::vector<double> row;
      for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["overlap"] = matrix_rows(s_hat);
  j["bhattacharyya"] = matrix_rows(f_hat);
  j["ratios"] = ratios.r;
  j["ess"] = ess;
  j["ess_normalized"] = ess_normalized;
  j["fixed_point_residual"] = fixed_point_residual;
  j["bridge_converged"] = bridge_converged;
  return j.dump(2);
}

}  // namespace mvmc
