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

#include "mvmc/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "mvmc/stats.hpp"
#include "json.hpp"

namespace mvmc {

void PenaltySchedule::init(int n_states) {
  ema_energy.assign(static_cast<std::size_t>(n_states), 0.0);
  ema_sigma.assign(static_cast<std::size_t>(n_states), 0.0);
  n_updates = 0;
}

void PenaltySchedule::update(const std::vector<double>& energies,
                             const std::vector<double>& sigmas) {
  for (std::size_t s = 0; s < ema_energy.size(); ++s) {
    if (n_updates == 0) {
      ema_energy[s] = energies[s];
      ema_sigma[s] = sigmas[s];
    } else {
      ema_energy[s] = decay * ema_energy[s] + (1.0 - decay) * energies[s];
      ema_sigma[s] = decay * ema_sigma[s] + (1.0 - decay) * sigmas[s];
    }
  }
  ++n_updates;
}

void PenaltySchedule::permute(const std::vector<int>& perm) {
  std::vector<double> e(ema_energy.size()), s(ema_sigma.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    e[i] = ema_energy[static_cast<std::size_t>(perm[i])];
    s[i] = ema_sigma[static_cast<std::size_t>(perm[i])];
  }
  ema_energy = e;
  ema_sigma = s;
}

Matrix penalty_weights(const PenaltySchedule& schedule) {
  const std::size_t n = schedule.ema_energy.size();
  Matrix beta(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t) continue;
      const double es = schedule.ema_energy[s];
      const double et = schedule.ema_energy[t];
      const bool penalizes = es < et || (es == et && s < t);
      if (!penalizes) continue;
      double term = std::max(schedule.ema_sigma[s], schedule.eps_floor);
      if (schedule.n_updates > 10) term = std::max(term, std::fabs(es - et));
      beta(s, t) = schedule.beta_tilde * term;
    }
  }
  return beta;
}

std::vector<int> energy_order(const PenaltySchedule& schedule) {
  std::vector<int> perm(schedule.ema_energy.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return schedule.ema_energy[static_cast<std::size_t>(a)] <
           schedule.ema_energy[static_cast<std::size_t>(b)];
  });
  return perm;
}

SnapResult snap_target(double s2, double lambda, int n_up, int n_down) {
  double start = 0.0;
  double step = 0.5;
  if (n_up >= 0 && n_down >= 0) {
    // parity of (n_up - n_down)/2 fixes the candidate ladder
    start = 0.5 * std::fabs(static_cast<double>(n_up - n_down));
    step = 1.0;
  }
  SnapResult best;
  best.s_star = start;
  double best_dist = std::fabs(start * (start + 1.0) - s2);
  for (double s = start + step;; s += step) {
    const double dist = std::fabs(s * (s + 1.0) - s2);
    if (dist < best_dist) {
      best_dist = dist;
      best.s_star = s;
    }
    if (s * (s + 1.0) > s2) break;
  }
  const double miss = s2 - best.s_star * (best.s_star + 1.0);
  best.loss = lambda * miss * miss;
  return best;
}

double snap_ramp(double t, double t_ramp, double width) {
  const double scale = width / (2.0 * std::log(9.0));
  const double z = (t - t_ramp) / scale;
  return 0.1 / (1.0 + std::exp(-z));
}

void MomentumOptimizer::step(ParamVector& params, std::vector<double> grad, double t) {
  double norm = 0.0;
  for (double g : grad) norm += g * g;
  norm = std::sqrt(norm);
  if (norm > grad_clip && norm > 0.0) {
    const double scale = grad_clip / norm;
    for (double& g : grad) g *= scale;
  }
  if (velocity.empty()) velocity.assign(grad.size(), 0.0);
  const double lr = lr0 / (1.0 + t / t_decay);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    velocity[i] = momentum * velocity[i] + grad[i];
    params[i] -= lr * velocity[i];
  }
}

namespace {

double signed_ratio(const SignedLogValue& num, const SignedLogValue& den, double log_shift) {
  if (num.sign == 0 || den.sign == 0) return 0.0;
  const double dlog = std::clamp(num.log_abs - den.log_abs + log_shift, -50.0, 50.0);
  return num.sign * den.sign * std::exp(dlog);
}

}  // namespace

double overlap_single_state_signed(const PooledBatch& pooled, const RatioVector& ratios, int s,
                                   int t) {
  const double shift_st = 0.5 * (std::log(ratios.r[static_cast<std::size_t>(t)]) -
                                 std::log(ratios.r[static_cast<std::size_t>(s)]));
  double sum_st = 0.0, sum_ts = 0.0;
  int n_s = 0, n_t = 0;
  for (const PooledSample& sample : pooled.samples) {
    const SignedLogValue& ps = sample.log_psi_all[static_cast<std::size_t>(s)];
    const SignedLogValue& pt = sample.log_psi_all[static_cast<std::size_t>(t)];
    if (sample.source_state == s) {
      sum_st += signed_ratio(pt, ps, shift_st);
      ++n_s;
    } else if (sample.source_state == t) {
      sum_ts += signed_ratio(ps, pt, -shift_st);
      ++n_t;
    }
  }
  if (n_s == 0 || n_t == 0) return 0.0;
  const double a = sum_st / n_s;
  const double b = sum_ts / n_t;
  const double mag = std::sqrt(std::max(0.0, a * b));
  return a >= 0.0 ? mag : -mag;
}

void add_overlap_pair_grad(const WaveFunctionModel& model, const ParamVector& params,
                           const PooledBatch& pooled, int s, int t, double o_st, double weight,
                           const RatioVector& ratios, std::vector<double>& grad, double o_center) {
  if (std::isnan(o_center)) o_center = o_st;
  // Only the higher state t of the pair is pushed; state s is treated as a
  // constant. If both states felt the penalty, any pair could rotate jointly
  // within its span: the energy sum is invariant under such rotations while
  // the overlap stays zero, and off the rotation valley the loss decreases
  // linearly on one side for every finite beta, so the orthogonal
  // eigenstates would not be a minimum. Anchoring the lower state by its
  // own energy removes that leak; the triangular beta matrix guarantees
  // each state is only ever pushed away from states below it.
  {
    const int a = t;
    const int b = s;
    const double shift = 0.5 * (std::log(ratios.r[static_cast<std::size_t>(b)]) -
                                std::log(ratios.r[static_cast<std::size_t>(a)]));
    std::vector<double> ratios_ab;
    std::vector<const PooledSample*> used;
    for (const PooledSample& sample : pooled.samples) {
      if (sample.source_state != a) continue;
      if (sample.log_psi_all[static_cast<std::size_t>(a)].sign == 0) continue;
      ratios_ab.push_back(signed_ratio(sample.log_psi_all[static_cast<std::size_t>(b)],
                                       sample.log_psi_all[static_cast<std::size_t>(a)], shift));
      used.push_back(&sample);
    }
    if (used.empty()) return;
    std::vector<double> mags;
    mags.reserve(ratios_ab.size());
    for (double v : ratios_ab) mags.push_back(std::fabs(v));
    const double cap = 5.0 * percentile(mags, 95.0);
    if (cap > 0.0)
      for (double& v : ratios_ab) v = std::clamp(v, -cap, cap);

    std::vector<double> acc(grad.size(), 0.0);
    int n_used = 0;
    for (std::size_t i = 0; i < used.size(); ++i) {
      std::vector<double> score;
      try {
        score = model.grad_log(params, a, used[i]->config);
      } catch (const NodeError&) {
        continue;
      }
      const double c = ratios_ab[i] - o_center;
      for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += c * score[p];
      ++n_used;
    }
    if (n_used == 0) return;
    const double scale = weight * 2.0 * o_st / static_cast<double>(n_used);
    for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += scale * acc[p];
  }
}

namespace {

const char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<double>& values) {
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xff));
  }
  std::string out;
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
    out.push_back(kB64Alphabet[(chunk >> 18) & 63]);
    out.push_back(kB64Alphabet[(chunk >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kB64Alphabet[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < bytes.size() ? kB64Alphabet[chunk & 63] : '=');
  }
  return out;
}

std::vector<double> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> bytes;
  std::uint32_t chunk = 0;
  int have = 0;
  for (char c : text) {
    const int v = value_of(c);
    if (v < 0) continue;
    chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    if (++have == 4) {
      bytes.push_back(static_cast<unsigned char>((chunk >> 16) & 0xff));
      bytes.push_back(static_cast<unsigned char>((chunk >> 8) & 0xff));
      bytes.push_back(static_cast<unsigned char>(chunk & 0xff));
      chunk = 0;
      have = 0;
    }
  }
  if (have == 3) {
    chunk <<= 6;
    bytes.push_back(static_cast<unsigned char>((chunk >> 16) & 0xff));
    bytes.push_back(static_cast<unsigned char>((chunk >> 8) & 0xff));
  } else if (have == 2) {
    chunk <<= 12;
    bytes.push_back(static_cast<unsigned char>((chunk >> 16) & 0xff));
  }
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes[8 * i + k]) << (8 * k);
    std::memcpy(&values[i], &bits, 8);
  }
  return values;
}

}  // namespace

std::string checkpoint_to_json(int step, const ParamVector& params,
                               const PenaltySchedule& schedule,
                               const std::vector<double>& step_sigmas,
                               const std::vector<std::uint64_t>& rng_cursors) {
  nlohmann::json j;
  j["step"] = step;
  for (const ParamSlice& s : params.layout().slices()) {
    std::vector<double> vals(params.values().begin() + static_cast<std::ptrdiff_t>(s.offset),
                             params.values().begin() +
                                 static_cast<std::ptrdiff_t>(s.offset + s.size));
    j["params"][s.name] = base64_encode(vals);
  }
  j["ema_energy"] = schedule.ema_energy;
  j["ema_sigma"] = schedule.ema_sigma;
  j["ema_updates"] = schedule.n_updates;
  j["step_sigmas"] = step_sigmas;
  j["rng_cursors"] = rng_cursors;
  return j.dump(2);
}

void checkpoint_from_json(const std::string& text, int& step, ParamVector& params,
                          PenaltySchedule& schedule, std::vector<double>& step_sigmas,
                          std::vector<std::uint64_t>& rng_cursors) {
  const nlohmann::json j = nlohmann::json::parse(text);
  step = j.at("step").get<int>();
  for (const ParamSlice& s : params.layout().slices()) {
    const std::vector<double> vals = base64_decode(j.at("params").at(s.name).get<std::string>());
    if (vals.size() != s.size) throw std::runtime_error("checkpoint slice size mismatch: " + s.name);
    std::copy(vals.begin(), vals.end(),
              params.values().begin() + static_cast<std::ptrdiff_t>(s.offset));
  }
  schedule.ema_energy = j.at("ema_energy").get<std::vector<double>>();
  schedule.ema_sigma = j.at("ema_sigma").get<std::vector<double>>();
  schedule.n_updates = j.at("ema_updates").get<int>();
  step_sigmas = j.at("step_sigmas").get<std::vector<double>>();
  rng_cursors = j.at("rng_cursors").get<std::vector<std::uint64_t>>();
}

TrainResult optimize(const WaveFunctionModel& model, const Hamiltonian& ham,
                     const TrainingOptions& options, const ParamVector& initial_params) {
  const int n_states = model.n_states();
  const int walkers_per_state = options.n_walkers_total / n_states;
  TrainResult result;
  result.params = initial_params;

  std::vector<ChainState> chains;
  for (int s = 0; s < n_states; ++s) {
    const int extra = s < options.n_walkers_total % n_states ? 1 : 0;
    chains.push_back(init_chain(model, result.params, s, walkers_per_state + extra, options.seed));
  }

  PenaltySchedule schedule;
  schedule.init(n_states);
  schedule.beta_tilde = options.beta_tilde;
  MomentumOptimizer opt;
  opt.lr0 = options.lr0;
  opt.t_decay = options.t_decay;
  opt.grad_clip = options.grad_clip;

  std::ofstream energy_csv, overlap_csv;
  const bool emit = !options.output_dir.empty();
  if (emit) {
    std::filesystem::create_directories(options.output_dir);
    energy_csv.open(options.output_dir + "/energy_trace.csv");
    overlap_csv.open(options.output_dir + "/overlap_trace.csv");
    energy_csv << "step,state,energy,energy_stderr\n";
    overlap_csv << "step,s,t,overlap,bhattacharyya,ess\n";
  }
  std::string last_good_checkpoint;
  ParamVector last_good_params = result.params;

  for (int step = 0; step < options.steps; ++step) {
    for (int s = 0; s < n_states; ++s) {
      ChainState& chain = chains[static_cast<std::size_t>(s)];
      for (int d = 0; d < options.decorr_steps; ++d)
        mh_step(chain, model, result.params, s, options.n_threads);
      adapt_step(chain, options.target_acceptance);
    }

    const PooledBatch pooled = pool_batch(chains, model, result.params);
    OverlapReport report;
    if (n_states > 1) {
      report = overlap_report(pooled, options.bridge_iters, options.bridge_clip);
    } else {
      report.ratios = RatioVector::ones(1);
      report.s_hat = Matrix::identity(1);
      report.f_hat = Matrix::identity(1);
      report.ess = {static_cast<double>(pooled.size())};
      report.ess_normalized = {1.0};
    }

    std::vector<double> grad(result.params.size(), 0.0);
    std::vector<double> energies(static_cast<std::size_t>(n_states), 0.0);
    std::vector<double> stderrs(static_cast<std::size_t>(n_states), 0.0);
    std::vector<double> sigmas(static_cast<std::size_t>(n_states), 0.0);
    for (int s = 0; s < n_states; ++s) {
      const EnergyGrad eg =
          energy_and_grad(ham, model, result.params, s, chains[static_cast<std::size_t>(s)].walkers);
      energies[static_cast<std::size_t>(s)] = eg.energy;
      stderrs[static_cast<std::size_t>(s)] = eg.stderr_;
      sigmas[static_cast<std::size_t>(s)] = eg.sigma;
      for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += eg.grad[p];
    }

    schedule.update(energies, sigmas);
    const Matrix beta = penalty_weights(schedule);
    Matrix overlap_for_penalty = report.s_hat;
    if (!options.msis_enabled && n_states > 1) {
      for (int s = 0; s < n_states; ++s)
        for (int t = s + 1; t < n_states; ++t) {
          const double v = overlap_single_state_signed(pooled, report.ratios, s, t);
          overlap_for_penalty(static_cast<std::size_t>(s), static_cast<std::size_t>(t)) = v;
          overlap_for_penalty(static_cast<std::size_t>(t), static_cast<std::size_t>(s)) = v;
        }
    }
    // Cross-half decorrelation for the penalty gradient: the trailing
    // factor O_st comes from the opposite half of the pooled batch than
    // the score expectation and its centering estimate. With everything
    // taken from the same samples the product carries bias terms of order
    // Var[O_hat] that do not vanish at orthogonality and slowly drag
    // converged states into each other; decorrelated, every bias term
    // picks up a factor E[O_hat] = S and dies at the stationary point.
    PooledBatch half_a, half_b;
    half_a.n_states = half_b.n_states = n_states;
    half_a.counts.assign(static_cast<std::size_t>(n_states), 0);
    half_b.counts.assign(static_cast<std::size_t>(n_states), 0);
    {
      std::vector<int> seen(static_cast<std::size_t>(n_states), 0);
      for (const PooledSample& sample : pooled.samples) {
        PooledBatch& dst =
            (seen[static_cast<std::size_t>(sample.source_state)]++ % 2 == 0) ? half_a : half_b;
        dst.samples.push_back(sample);
        ++dst.counts[static_cast<std::size_t>(sample.source_state)];
      }
    }
    auto half_overlap = [&](const PooledBatch& half) {
      if (options.msis_enabled) return overlap_msis(half, report.ratios);
      Matrix o = Matrix::identity(static_cast<std::size_t>(n_states));
      for (int s = 0; s < n_states; ++s)
        for (int t = s + 1; t < n_states; ++t) {
          const double v = overlap_single_state_signed(half, report.ratios, s, t);
          o(static_cast<std::size_t>(s), static_cast<std::size_t>(t)) = v;
          o(static_cast<std::size_t>(t), static_cast<std::size_t>(s)) = v;
        }
      return o;
    };
    Matrix o_a = Matrix::identity(static_cast<std::size_t>(n_states));
    Matrix o_b = o_a;
    if (n_states > 1) {
      o_a = half_overlap(half_a);
      o_b = half_overlap(half_b);
    }
    for (int s = 0; s < n_states; ++s) {
      for (int t = 0; t < n_states; ++t) {
        const double w = beta(static_cast<std::size_t>(s), static_cast<std::size_t>(t));
        if (w == 0.0) continue;
        add_overlap_pair_grad(model, result.params, half_b, s, t,
                              o_a(static_cast<std::size_t>(s), static_cast<std::size_t>(t)),
                              0.5 * w, report.ratios, grad,
                              o_b(static_cast<std::size_t>(s), static_cast<std::size_t>(t)));
        add_overlap_pair_grad(model, result.params, half_a, s, t,
                              o_b(static_cast<std::size_t>(s), static_cast<std::size_t>(t)),
                              0.5 * w, report.ratios, grad,
                              o_a(static_cast<std::size_t>(s), static_cast<std::size_t>(t)));
      }
    }

    if (options.snap_enabled && !options.s2_values.empty()) {
      // <S^2> comes from config, so the snap loss carries no parameter
      // gradient here; it is tracked for the schedule and the trace.
      const double lambda = snap_ramp(step, options.snap_t_ramp, options.snap_width);
      for (double s2 : options.s2_values) snap_target(s2, lambda);
    }

    opt.step(result.params, grad, static_cast<double>(step));

    bool nan_found = false;
    for (double v : result.params.values())
      if (!std::isfinite(v)) nan_found = true;
    if (nan_found) {
      result.nan_abort = true;
      result.params = last_good_params;
      if (emit && !last_good_checkpoint.empty()) {
        std::ofstream out(options.output_dir + "/checkpoint.json");
        out << last_good_checkpoint;
      }
      break;
    }
    last_good_params = result.params;

    const std::vector<int> perm = energy_order(schedule);
    bool is_identity = true;
    for (std::size_t i = 0; i < perm.size(); ++i)
      if (perm[i] != static_cast<int>(i)) is_identity = false;
    if (!is_identity) {
      model.permute_states(result.params, perm);
      last_good_params = result.params;
      schedule.permute(perm);
      std::vector<ChainState> new_chains;
      std::vector<double> new_e(energies.size()), new_se(stderrs.size());
      for (std::size_t i = 0; i < perm.size(); ++i) {
        ChainState c = std::move(chains[static_cast<std::size_t>(perm[i])]);
        c.rng_stream = static_cast<std::uint64_t>(i) + 1;
        new_chains.push_back(std::move(c));
        new_e[i] = energies[static_cast<std::size_t>(perm[i])];
        new_se[i] = stderrs[static_cast<std::size_t>(perm[i])];
      }
      chains = std::move(new_chains);
      energies = new_e;
      stderrs = new_se;
      // opt velocity follows parameter identity, not state identity; with
      // state-exclusive slices permuted the stale momentum is dropped
      opt.velocity.assign(grad.size(), 0.0);
    }

    const bool trace_now = step % options.trace_every == 0 || step == options.steps - 1;
    if (trace_now) {
      for (int s = 0; s < n_states; ++s) {
        result.energy_trace.push_back({static_cast<double>(step), static_cast<double>(s),
                                       energies[static_cast<std::size_t>(s)],
                                       stderrs[static_cast<std::size_t>(s)]});
        if (emit)
          energy_csv << step << ',' << s << ',' << energies[static_cast<std::size_t>(s)] << ','
                     << stderrs[static_cast<std::size_t>(s)] << '\n';
      }
      for (int s = 0; s < n_states; ++s)
        for (int t = s + 1; t < n_states; ++t) {
          const double ov = options.msis_enabled
                                ? report.s_hat(static_cast<std::size_t>(s),
                                               static_cast<std::size_t>(t))
                                : overlap_for_penalty(static_cast<std::size_t>(s),
                                                      static_cast<std::size_t>(t));
          const double f = report.f_hat(static_cast<std::size_t>(s), static_cast<std::size_t>(t));
          const double ess = std::min(report.ess_normalized[static_cast<std::size_t>(s)],
                                      report.ess_normalized[static_cast<std::size_t>(t)]);
          result.overlap_trace.push_back(
              {static_cast<double>(step), static_cast<double>(s), static_cast<double>(t), ov, f,
               ess});
          if (emit) overlap_csv << step << ',' << s << ',' << t << ',' << ov << ',' << f << ',' << ess << '\n';
        }
    }

    if (step % options.checkpoint_every == 0 || step == options.steps - 1) {
      std::vector<double> sigmas_now;
      std::vector<std::uint64_t> cursors;
      for (const ChainState& c : chains) {
        sigmas_now.push_back(c.step_sigma);
        cursors.push_back(c.step_count);
      }
      last_good_checkpoint = checkpoint_to_json(step, result.params, schedule, sigmas_now, cursors);
      if (emit) {
        std::ofstream out(options.output_dir + "/checkpoint.json");
        out << last_good_checkpoint;
      }
    }

    result.steps_done = step + 1;
    result.energies = energies;
    result.energy_stderr = stderrs;
    result.overlap = options.msis_enabled ? report.s_hat : overlap_for_penalty;
    result.bhattacharyya_ = report.f_hat;
    result.ess_normalized = report.ess_normalized;

    for (int s = 0; s < n_states && !result.collapse_flag; ++s)
      for (int t = s + 1; t < n_states; ++t) {
        if (std::fabs(energies[static_cast<std::size_t>(s)] -
                      energies[static_cast<std::size_t>(t)]) < 1e-4 &&
            std::fabs(result.overlap(static_cast<std::size_t>(s), static_cast<std::size_t>(t))) >
                0.9)
          result.collapse_flag = true;
      }
  }

  result.step_sigmas.clear();
  for (const ChainState& c : chains) result.step_sigmas.push_back(c.step_sigma);
  return result;
}

}  // namespace mvmc
