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

#include "mvmc/ansatz.hpp"

#include <cmath>
#include <limits>

namespace mvmc {

bool antisymmetry_check(const WaveFunctionModel& model, const ParamVector& params, int state,
                        const Configuration& config, int i, int j) {
  Configuration swapped = config;
  for (int d = 0; d < config.dim(); ++d)
    std::swap(swapped.coords(static_cast<std::size_t>(i), d), swapped.coords(static_cast<std::size_t>(j), d));
  const SignedLogValue a = model.eval(params, state, config);
  const SignedLogValue b = model.eval(params, state, swapped);
  if (a.sign == 0 && b.sign == 0) return true;
  if (a.sign != -b.sign) return false;
  return std::abs(a.log_abs - b.log_abs) <= 1e-12 * std::max(1.0, std::abs(a.log_abs));
}

// ---------------------------------------------------------------------------
// HermiteGaussianModel
// ---------------------------------------------------------------------------

namespace {

// Physicists' Hermite values H_0..H_n at z.
std::vector<double> hermite_values(int max_degree, double z) {
  std::vector<double> h(max_degree + 1);
  h[0] = 1.0;
  if (max_degree >= 1) h[1] = 2.0 * z;
  for (int n = 1; n < max_degree; ++n) h[n + 1] = 2.0 * z * h[n] - 2.0 * n * h[n - 1];
  return h;
}

struct HermitePoly {
  double p = 0.0, dp = 0.0, ddp = 0.0;  // value and z-derivatives
};

HermitePoly hermite_poly(std::span<const double> coeff, double z) {
  const int max_degree = static_cast<int>(coeff.size()) - 1;
  const std::vector<double> h = hermite_values(max_degree, z);
  HermitePoly out;
  for (int m = 0; m <= max_degree; ++m) {
    out.p += coeff[m] * h[m];
    if (m >= 1) out.dp += coeff[m] * 2.0 * m * h[m - 1];
    if (m >= 2) out.ddp += coeff[m] * 4.0 * m * (m - 1) * h[m - 2];
  }
  return out;
}

}  // namespace

HermiteGaussianModel::HermiteGaussianModel(int n_states, int max_degree)
    : n_states_(n_states), max_degree_(max_degree) {
  for (int s = 0; s < n_states; ++s)
    layout_.add("c_state_" + std::to_string(s), static_cast<std::size_t>(max_degree + 1));
  layout_.add("alpha", 1);
}

SignedLogValue HermiteGaussianModel::eval(const ParamVector& params, int state,
                                          const Configuration& config) const {
  const double x = config.coords(0, 0);
  if (!std::isfinite(x)) throw EvalError("non-finite coordinate at particle 0");
  const double alpha = params.slice("alpha")[0];
  const double z = std::sqrt(2.0 * alpha) * x;
  const HermitePoly hp = hermite_poly(params.slice("c_state_" + std::to_string(state)), z);
  if (hp.p == 0.0) return SignedLogValue::zero();
  return {hp.p > 0.0 ? 1 : -1, std::log(std::abs(hp.p)) - alpha * x * x};
}

std::vector<double> HermiteGaussianModel::grad_log(const ParamVector& params, int state,
                                                   const Configuration& config) const {
  const double x = config.coords(0, 0);
  const double alpha = params.slice("alpha")[0];
  const double z = std::sqrt(2.0 * alpha) * x;
  const std::string cname = "c_state_" + std::to_string(state);
  const HermitePoly hp = hermite_poly(params.slice(cname), z);
  if (hp.p == 0.0) throw NodeError("grad_log at an exact node");
  std::vector<double> grad(params.size(), 0.0);
  const ParamSlice& cs = layout_.slice(cname);
  const std::vector<double> h = hermite_values(max_degree_, z);
  for (int m = 0; m <= max_degree_; ++m) grad[cs.offset + m] = h[m] / hp.p;
  const ParamSlice& as = layout_.slice("alpha");
  grad[as.offset] = (hp.dp / hp.p) * (x / std::sqrt(2.0 * alpha)) - x * x;
  return grad;
}

LaplacianLog HermiteGaussianModel::laplacian_log(const ParamVector& params, int state,
                                                 const Configuration& config) const {
  const double x = config.coords(0, 0);
  const double alpha = params.slice("alpha")[0];
  const double s2a = std::sqrt(2.0 * alpha);
  const double z = s2a * x;
  const HermitePoly hp = hermite_poly(params.slice("c_state_" + std::to_string(state)), z);
  if (hp.p == 0.0) throw NodeError("laplacian_log at an exact node");
  const double d1 = (hp.dp / hp.p) * s2a - 2.0 * alpha * x;
  const double d2 = (hp.ddp * hp.p - hp.dp * hp.dp) / (hp.p * hp.p) * (2.0 * alpha) - 2.0 * alpha;
  return {d2, d1 * d1};
}

void HermiteGaussianModel::permute_states(ParamVector& params, const std::vector<int>& perm) const {
  const ParamVector old = params;
  for (int s = 0; s < n_states_; ++s) {
    auto dst = params.slice("c_state_" + std::to_string(s));
    auto src = old.slice("c_state_" + std::to_string(perm[s]));
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

Configuration HermiteGaussianModel::initial_config(CounterRng& rng) const {
  Configuration c;
  c.coords = Matrix(1, 1);
  c.coords(0, 0) = rng.normal();
  c.n_up = 1;
  return c;
}

ParamVector HermiteGaussianModel::default_params(CounterRng& rng) const {
  ParamVector p = eigenstate_params(0.5);
  for (int s = 0; s < n_states_; ++s) {
    auto c = p.slice("c_state_" + std::to_string(s));
    for (double& v : c) v += 0.05 * rng.normal();
  }
  return p;
}

ParamVector HermiteGaussianModel::eigenstate_params(double alpha) const {
  ParamVector p(&layout_);
  for (int s = 0; s < n_states_; ++s) {
    auto c = p.slice("c_state_" + std::to_string(s));
    c[static_cast<std::size_t>(std::min(s, max_degree_))] = 1.0;
  }
  p.slice("alpha")[0] = alpha;
  return p;
}

// ---------------------------------------------------------------------------
// ExcitedPfaffianModel
// ---------------------------------------------------------------------------

namespace {
constexpr std::array<double, 4> kFeatureExponents = {0.5, 1.0, 2.0, 4.0};
}

std::string ExcitedPfaffianModel::a_slice_name(int state) {
  return "A_state_" + std::to_string(state);
}

ExcitedPfaffianModel::ExcitedPfaffianModel(int n_states, int n_det, int n_orb,
                                           std::vector<std::array<double, 3>> nuclei, int n_up,
                                           int n_down)
    : n_states_(n_states), n_det_(n_det), n_orb_(n_orb), n_up_(n_up), n_down_(n_down),
      nuclei_(std::move(nuclei)) {
  if (n_orb_ % 2 != 0) throw std::invalid_argument("ExcitedPfaffianModel: n_orb must be even");
  if ((n_up_ + n_down_) % 2 != 0)
    throw std::invalid_argument("ExcitedPfaffianModel: particle count must be even");
  if (n_orb_ < n_up_ + n_down_)
    throw std::invalid_argument("ExcitedPfaffianModel: n_orb must be >= n_particles");
  const std::size_t wsize =
      static_cast<std::size_t>(n_det_) * n_orb_ * n_features();
  layout_.add("w_up", wsize);
  layout_.add("w_down", wsize);
  layout_.add("alpha", static_cast<std::size_t>(n_orb_));
  const std::size_t tri = static_cast<std::size_t>(n_orb_) * (n_orb_ - 1) / 2;
  for (int s = 0; s < n_states_; ++s)
    layout_.add(a_slice_name(s), static_cast<std::size_t>(n_det_) * tri);
}

Matrix ExcitedPfaffianModel::features(const Configuration& config) const {
  const int n = config.n_particles();
  Matrix h(static_cast<std::size_t>(n), static_cast<std::size_t>(n_features()));
  for (int i = 0; i < n; ++i) {
    int f = 0;
    for (const auto& nuc : nuclei_) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double dx = config.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) - nuc[static_cast<std::size_t>(c)];
        d2 += dx * dx;
      }
      for (double gamma : kFeatureExponents) {
        const double v = std::exp(-gamma * d2);
        if (!std::isfinite(v)) throw EvalError("non-finite feature at particle " + std::to_string(i));
        h(static_cast<std::size_t>(i), static_cast<std::size_t>(f++)) = v;
      }
    }
  }
  return h;
}

Matrix ExcitedPfaffianModel::envelopes(const ParamVector& params, const Configuration& config) const {
  const int n = config.n_particles();
  auto alpha = params.slice("alpha");
  Matrix chi(static_cast<std::size_t>(n), static_cast<std::size_t>(n_orb_));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n_orb_; ++j) {
      const auto& nuc = nuclei_[static_cast<std::size_t>(j) % nuclei_.size()];
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double dx = config.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) - nuc[static_cast<std::size_t>(c)];
        d2 += dx * dx;
      }
      chi(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = std::exp(-alpha[static_cast<std::size_t>(j)] * std::sqrt(d2));
    }
  }
  return chi;
}

Matrix ExcitedPfaffianModel::orbital_matrix(const ParamVector& params, const Configuration& config,
                                            int k) const {
  const int n = config.n_particles();
  const int nf = n_features();
  const Matrix h = features(config);
  const Matrix chi = envelopes(params, config);
  auto w_up = params.slice("w_up");
  auto w_down = params.slice("w_down");
  Matrix phi(static_cast<std::size_t>(n), static_cast<std::size_t>(n_orb_));
  for (int i = 0; i < n; ++i) {
    const auto w = config.spin(i) == 0 ? w_up : w_down;
    for (int j = 0; j < n_orb_; ++j) {
      double u = 0.0;
      const std::size_t base = (static_cast<std::size_t>(k) * n_orb_ + j) * nf;
      for (int f = 0; f < nf; ++f) u += h(static_cast<std::size_t>(i), static_cast<std::size_t>(f)) * w[base + f];
      phi(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = u * chi(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  return phi;
}

Matrix ExcitedPfaffianModel::antisymmetrizer(const ParamVector& params, int state, int k) const {
  const std::size_t tri = static_cast<std::size_t>(n_orb_) * (n_orb_ - 1) / 2;
  auto a = params.slice(a_slice_name(state));
  std::vector<double> upper(a.begin() + static_cast<std::ptrdiff_t>(k * tri),
                            a.begin() + static_cast<std::ptrdiff_t>((k + 1) * tri));
  return SkewMatrix::from_upper(static_cast<std::size_t>(n_orb_), upper).to_dense();
}

void ExcitedPfaffianModel::set_antisymmetrizer(ParamVector& params, int state, int k,
                                               const SkewMatrix& m) const {
  const std::size_t tri = static_cast<std::size_t>(n_orb_) * (n_orb_ - 1) / 2;
  auto a = params.slice(a_slice_name(state));
  std::copy(m.upper_data().begin(), m.upper_data().end(), a.begin() + static_cast<std::ptrdiff_t>(k * tri));
}

SignedLogValue ExcitedPfaffianModel::eval(const ParamVector& params, int state,
                                          const Configuration& config) const {
  // Coincident same-spin particles duplicate a row of Phi, an exact node.
  const int n = config.n_particles();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (config.spin(i) != config.spin(j)) continue;
      bool same = true;
      for (std::size_t d = 0; d < config.coords.cols(); ++d)
        same = same && config.coords(static_cast<std::size_t>(i), d) ==
                           config.coords(static_cast<std::size_t>(j), d);
      if (same) return {0, -std::numeric_limits<double>::infinity()};
    }

  std::vector<SignedLogValue> terms;
  terms.reserve(static_cast<std::size_t>(n_det_));
  for (int k = 0; k < n_det_; ++k) {
    const Matrix phi = orbital_matrix(params, config, k);
    const Matrix a = antisymmetrizer(params, state, k);
    Matrix m = phi * (a * phi.transpose());
    // Symmetrize away matmul round-off; M is skew analytically.
    for (std::size_t i = 0; i < m.rows(); ++i) {
      m(i, i) = 0.0;
      for (std::size_t j = i + 1; j < m.cols(); ++j) {
        const double v = 0.5 * (m(i, j) - m(j, i));
        m(i, j) = v;
        m(j, i) = -v;
      }
    }
    terms.push_back(pfaffian_dense(std::move(m)));
  }
  return signed_log_sum(terms);
}

std::vector<double> ExcitedPfaffianModel::grad_log(const ParamVector& params, int state,
                                                   const Configuration& config) const {
  const int n = config.n_particles();
  const int nf = n_features();
  const SignedLogValue psi = eval(params, state, config);
  if (psi.sign == 0) throw NodeError("grad_log at an exact node");

  const Matrix h = features(config);
  const Matrix chi = envelopes(params, config);
  std::vector<double> grad(params.size(), 0.0);
  const ParamSlice& w_up_s = layout_.slice("w_up");
  const ParamSlice& w_down_s = layout_.slice("w_down");
  const ParamSlice& alpha_s = layout_.slice("alpha");
  const ParamSlice& a_s = layout_.slice(a_slice_name(state));
  const std::size_t tri = static_cast<std::size_t>(n_orb_) * (n_orb_ - 1) / 2;

  for (int k = 0; k < n_det_; ++k) {
    const Matrix phi = orbital_matrix(params, config, k);
    const Matrix a = antisymmetrizer(params, state, k);
    Matrix m = phi * (a * phi.transpose());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      m(i, i) = 0.0;
      for (std::size_t j = i + 1; j < m.cols(); ++j) {
        const double v = 0.5 * (m(i, j) - m(j, i));
        m(i, j) = v;
        m(j, i) = -v;
      }
    }
    const SignedLogValue pk = pfaffian_dense(m);
    if (pk.sign == 0) continue;  // singular term contributes no inverse-based gradient
    const double weight = pk.sign * psi.sign * std::exp(pk.log_abs - psi.log_abs);

    const Matrix minv = invert(m);
    // d log Pf / dA_pq (strict upper) = -(Phi^T M^-1 Phi)_pq
    const Matrix g = phi.transpose() * (minv * phi);
    std::size_t t = 0;
    for (int p = 0; p < n_orb_; ++p)
      for (int q = p + 1; q < n_orb_; ++q, ++t)
        grad[a_s.offset + static_cast<std::size_t>(k) * tri + t] += weight * (-g(static_cast<std::size_t>(p), static_cast<std::size_t>(q)));

    // d log Pf / dPhi = M^-1 Phi A
    const Matrix gphi = minv * (phi * a);
    for (int i = 0; i < n; ++i) {
      const ParamSlice& ws = config.spin(i) == 0 ? w_up_s : w_down_s;
      for (int j = 0; j < n_orb_; ++j) {
        const double gp = gphi(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        if (gp == 0.0) continue;
        const std::size_t base = ws.offset + (static_cast<std::size_t>(k) * n_orb_ + j) * nf;
        const double c = chi(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        for (int f = 0; f < nf; ++f)
          grad[base + f] += weight * gp * c * h(static_cast<std::size_t>(i), static_cast<std::size_t>(f));
        // envelope decay: dPhi_ij/dalpha_j = -|r_i - n_m(j)| Phi_ij
        const auto& nuc = nuclei_[static_cast<std::size_t>(j) % nuclei_.size()];
        double d2 = 0.0;
        for (int cdim = 0; cdim < 3; ++cdim) {
          const double dx = config.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(cdim)) - nuc[static_cast<std::size_t>(cdim)];
          d2 += dx * dx;
        }
        grad[alpha_s.offset + static_cast<std::size_t>(j)] +=
            weight * gp * (-std::sqrt(d2)) * phi(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  return grad;
}

LaplacianLog ExcitedPfaffianModel::laplacian_log(const ParamVector& params, int state,
                                                 const Configuration& config) const {
  const SignedLogValue center = eval(params, state, config);
  if (center.sign == 0) throw NodeError("laplacian_log at an exact node");
  const double h = fd_step_;
  double lap = 0.0, grad_sq = 0.0;
  Configuration c = config;
  for (int i = 0; i < config.n_particles(); ++i) {
    for (int d = 0; d < config.dim(); ++d) {
      const double x0 = config.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d));
      c.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) = x0 + h;
      const SignedLogValue lp = eval(params, state, c);
      c.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) = x0 - h;
      const SignedLogValue lm = eval(params, state, c);
      c.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) = x0;
      if (lp.sign == 0 || lm.sign == 0) throw NodeError("finite-difference stencil hit a node");
      const double d1 = (lp.log_abs - lm.log_abs) / (2.0 * h);
      const double d2 = (lp.log_abs - 2.0 * center.log_abs + lm.log_abs) / (h * h);
      lap += d2;
      grad_sq += d1 * d1;
    }
  }
  return {lap, grad_sq};
}

void ExcitedPfaffianModel::permute_states(ParamVector& params, const std::vector<int>& perm) const {
  const ParamVector old = params;
  for (int s = 0; s < n_states_; ++s) {
    auto dst = params.slice(a_slice_name(s));
    auto src = old.slice(a_slice_name(perm[s]));
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

Configuration ExcitedPfaffianModel::initial_config(CounterRng& rng) const {
  const int n = n_particles();
  Configuration c;
  c.coords = Matrix(static_cast<std::size_t>(n), 3);
  c.n_up = n_up_;
  for (int i = 0; i < n; ++i) {
    const auto& nuc = nuclei_[static_cast<std::size_t>(i) % nuclei_.size()];
    for (int d = 0; d < 3; ++d)
      c.coords(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) = nuc[static_cast<std::size_t>(d)] + rng.normal();
  }
  return c;
}

ParamVector ExcitedPfaffianModel::default_params(CounterRng& rng) const {
  ParamVector p(&layout_);
  for (double& v : p.slice("w_up")) v = 0.5 + 0.1 * rng.normal();
  for (double& v : p.slice("w_down")) v = 0.5 + 0.1 * rng.normal();
  for (double& v : p.slice("alpha")) v = 1.0 + 0.1 * rng.uniform();
  // Canonical pairing block-diagonal plus tie-breaking noise.
  for (int s = 0; s < n_states_; ++s) {
    for (int k = 0; k < n_det_; ++k) {
      SkewMatrix a(static_cast<std::size_t>(n_orb_));
      for (int b = 0; b + 1 < n_orb_; b += 2) a.upper(static_cast<std::size_t>(b), static_cast<std::size_t>(b + 1)) = 1.0;
      for (int i = 0; i < n_orb_; ++i)
        for (int j = i + 1; j < n_orb_; ++j)
          a.upper(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) += 1e-2 * rng.normal();
      set_antisymmetrizer(p, s, k, a);
    }
  }
  return p;
}

}  // namespace mvmc
