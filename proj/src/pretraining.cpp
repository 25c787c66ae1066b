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

#include "mvmc/pretraining.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "mvmc/sampler.hpp"
#include "json.hpp"

namespace mvmc {

Matrix Selector::to_matrix(int n_orb) const {
  Matrix pi(static_cast<std::size_t>(n_orb), occupied.size());
  for (std::size_t col = 0; col < occupied.size(); ++col)
    pi(static_cast<std::size_t>(occupied[col]), col) = 1.0;
  return pi;
}

int selector_det(const Selector& a, const Selector& b) {
  std::vector<int> sa = a.occupied, sb = b.occupied;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb ? 1 : 0;
}

double rmsd(const Structure& a, const Structure& b, bool kabsch) {
  if (a.nuclei.size() != b.nuclei.size() || a.charges != b.charges)
    throw std::invalid_argument("rmsd: mismatched atom lists");
  const std::size_t n = a.nuclei.size();
  Matrix ma(n, 3), mb(n, 3);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < 3; ++d) {
      ma(i, d) = a.nuclei[i][d];
      mb(i, d) = b.nuclei[i][d];
    }
  if (kabsch) {
    for (std::size_t d = 0; d < 3; ++d) {
      double ca = 0.0, cb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ca += ma(i, d);
        cb += mb(i, d);
      }
      ca /= static_cast<double>(n);
      cb /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        ma(i, d) -= ca;
        mb(i, d) -= cb;
      }
    }
    ma = ma * procrustes(ma, mb).rotation;
  }
  const Matrix diff = ma - mb;
  return diff.frobenius_norm() / std::sqrt(static_cast<double>(n));
}

StructureGraph build_graph(const std::vector<Structure>& structures) {
  const std::size_t n = structures.size();
  StructureGraph graph;
  graph.parent.assign(n, -1);
  if (n == 0) throw std::invalid_argument("build_graph: empty structure list");
  if (n == 1) {
    graph.order = {0};
    return graph;
  }

  struct WeightedEdge {
    double w;
    int a, b;
  };
  std::vector<WeightedEdge> all;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      all.push_back({rmsd(structures[i], structures[j]), static_cast<int>(i),
                     static_cast<int>(j)});
  std::stable_sort(all.begin(), all.end(),
                   [](const WeightedEdge& x, const WeightedEdge& y) { return x.w < y.w; });

  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (comp[static_cast<std::size_t>(x)] != x) x = comp[static_cast<std::size_t>(x)];
    return x;
  };
  for (const WeightedEdge& e : all) {
    const int ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    comp[static_cast<std::size_t>(ra)] = rb;
    graph.edges.emplace_back(e.a, e.b);
    if (graph.edges.size() == n - 1) break;
  }

  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : graph.edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  auto eccentricity = [&](int start) {
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    q.push(start);
    dist[static_cast<std::size_t>(start)] = 0;
    int ecc = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      ecc = std::max(ecc, dist[static_cast<std::size_t>(u)]);
      for (int v : adj[static_cast<std::size_t>(u)])
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          q.push(v);
        }
    }
    return ecc;
  };
  int best_ecc = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < n; ++i) {
    const int e = eccentricity(static_cast<int>(i));
    const bool better =
        e < best_ecc ||
        (e == best_ecc && structures[i].id < structures[static_cast<std::size_t>(graph.root)].id);
    if (better) {
      best_ecc = e;
      graph.root = static_cast<int>(i);
    }
  }

  std::vector<bool> seen(n, false);
  std::queue<int> q;
  q.push(graph.root);
  seen[static_cast<std::size_t>(graph.root)] = true;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    graph.order.push_back(u);
    for (int v : adj[static_cast<std::size_t>(u)])
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        graph.parent[static_cast<std::size_t>(v)] = u;
        q.push(v);
      }
  }
  return graph;
}

std::vector<int> cluster_orbital_energies(const std::vector<double>& eps, double bandwidth) {
  if (eps.empty()) return {};
  const double lo = *std::min_element(eps.begin(), eps.end()) - 3.0 * bandwidth;
  const double hi = *std::max_element(eps.begin(), eps.end()) + 3.0 * bandwidth;

  // evaluation points: 512-point grid plus the sample points themselves, so
  // narrow bandwidths still resolve one mode per distinct energy
  std::vector<double> points;
  constexpr int kGrid = 512;
  for (int i = 0; i < kGrid; ++i)
    points.push_back(lo + (hi - lo) * static_cast<double>(i) / (kGrid - 1));
  points.insert(points.end(), eps.begin(), eps.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  auto kde = [&](double x) {
    double s = 0.0;
    for (double e : eps) {
      const double z = (x - e) / bandwidth;
      s += std::exp(-0.5 * z * z);
    }
    return s;
  };
  std::vector<double> dens(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) dens[i] = kde(points[i]);

  std::vector<double> centroids;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double left = i > 0 ? dens[i - 1] : -1.0;
    const double right = i + 1 < points.size() ? dens[i + 1] : -1.0;
    if (dens[i] >= left && dens[i] > right) centroids.push_back(points[i]);
    else if (i + 1 == points.size() && dens[i] >= left) centroids.push_back(points[i]);
  }
  if (centroids.empty()) centroids.push_back(points[points.size() / 2]);

  std::vector<int> groups(eps.size(), 0);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < centroids.size(); ++c)
      if (std::fabs(eps[i] - centroids[c]) < std::fabs(eps[i] - centroids[best])) best = c;
    groups[i] = static_cast<int>(best);
  }

  // relabel so groups are contiguous 0..k-1 in sorted-energy order
  std::vector<std::size_t> order(eps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });
  std::vector<int> relabel(centroids.size(), -1);
  int next = 0;
  for (std::size_t i : order)
    if (relabel[static_cast<std::size_t>(groups[i])] < 0)
      relabel[static_cast<std::size_t>(groups[i])] = next++;
  for (int& g : groups) g = relabel[static_cast<std::size_t>(g)];
  return groups;
}

AlignResult blockwise_align(const Matrix& c_child, const Matrix& c_parent, const Matrix& s_cross,
                            const std::vector<int>& groups) {
  const std::size_t n_orb = c_child.cols();
  const Matrix m = c_child.transpose() * (s_cross * c_parent);
  AlignResult out;
  out.rotation = Matrix(n_orb, n_orb);
  const int n_groups = groups.empty() ? 0 : *std::max_element(groups.begin(), groups.end()) + 1;
  for (int g = 0; g < n_groups; ++g) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (groups[i] == g) idx.push_back(i);
    Matrix block(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = m(idx[a], idx[b]);
    const ProcrustesResult pr = procrustes_from_cross(block);
    if (pr.degenerate) out.degenerate = true;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) out.rotation(idx[a], idx[b]) = pr.rotation(a, b);
  }
  out.c = c_child * out.rotation;
  return out;
}

void propagate_orbitals(const StructureGraph& graph, std::vector<Structure>& structures,
                        double bandwidth) {
  for (int node : graph.order) {
    Structure& child = structures[static_cast<std::size_t>(node)];
    const int parent = graph.parent[static_cast<std::size_t>(node)];
    if (parent < 0) {
      child.parent_id = -1;
      child.rotation = Matrix::identity(child.c.cols());
      continue;
    }
    const Structure& par = structures[static_cast<std::size_t>(parent)];
    child.parent_id = par.id;
    Matrix projected;
    try {
      projected = symmetric_orthogonalize(par.c, child.s_basis);
    } catch (const std::exception& err) {
      throw std::runtime_error("propagate_orbitals: singular projection on edge " +
                               std::to_string(par.id) + "->" + std::to_string(child.id) + ": " +
                               err.what());
    }
    // both coefficient sets now live in the child basis, so the child's own
    // overlap matrix doubles as the cross-basis overlap
    const std::vector<int> groups = cluster_orbital_energies(child.eps, bandwidth);
    const AlignResult aligned = blockwise_align(child.c, projected, child.s_basis, groups);
    child.c = aligned.c;
    child.rotation = aligned.rotation;
  }
}

std::vector<Selector> selector_set(
    int n_orb, int n_elec, const std::vector<std::vector<std::pair<int, int>>>& excitations) {
  std::vector<Selector> out;
  Selector ground;
  for (int i = 0; i < n_elec; ++i) ground.occupied.push_back(i);
  out.push_back(ground);
  for (const auto& state_exc : excitations) {
    Selector sel = ground;
    for (const auto& [from, to] : state_exc) {
      if (from < 0 || from >= n_orb || to < 0 || to >= n_orb)
        throw std::invalid_argument("selector_set: orbital index out of range");
      auto it = std::find(sel.occupied.begin(), sel.occupied.end(), from);
      if (it == sel.occupied.end())
        throw std::invalid_argument("selector_set: excitation source not occupied");
      if (std::find(sel.occupied.begin(), sel.occupied.end(), to) != sel.occupied.end())
        throw std::invalid_argument("selector_set: excitation target already occupied");
      *it = to;
    }
    std::sort(sel.occupied.begin(), sel.occupied.end());
    out.push_back(sel);
  }
  for (std::size_t s = 0; s < out.size(); ++s)
    for (std::size_t t = s + 1; t < out.size(); ++t)
      if (selector_det(out[s], out[t]) != 0)
        throw std::invalid_argument("selector_set: duplicate occupation sets for states " +
                                    std::to_string(s) + " and " + std::to_string(t));
  return out;
}

double gaussian_overlap(double a, const std::array<double, 3>& ca, double b,
                        const std::array<double, 3>& cb) {
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double diff = ca[k] - cb[k];
    d2 += diff * diff;
  }
  const double p = a + b;
  return std::pow(M_PI / p, 1.5) * std::exp(-a * b / p * d2);
}

Matrix target_orbitals(const PretrainTarget& target, const Configuration& config) {
  const std::size_t n = config.coords.rows();
  Matrix basis(n, target.centers.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < target.centers.size(); ++b) {
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double diff = config.coords(i, static_cast<std::size_t>(k)) - target.centers[b][k];
        d2 += diff * diff;
      }
      basis(i, b) = std::exp(-target.exponents[b] * d2);
    }
  return basis * target.c;
}

Structure synth_hf(const SynthHfSpec& spec) {
  Structure out;
  out.id = spec.id;
  out.nuclei = spec.nuclei;
  out.charges = spec.charges;

  std::vector<std::array<double, 3>> centers;
  std::vector<double> exponents;
  for (const auto& nucleus : spec.nuclei)
    for (double a : spec.exponent_ladder) {
      centers.push_back(nucleus);
      exponents.push_back(a);
    }
  const std::size_t nb = centers.size();
  out.s_basis = Matrix(nb, nb);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      out.s_basis(i, j) = gaussian_overlap(exponents[i], centers[i], exponents[j], centers[j]);

  // seeded symmetric core surrogate: diagonal attraction scaled by exponent
  // plus small noise, solved as a generalized eigenproblem in the S metric
  CounterRng rng(spec.seed, 0x70726574ULL, 0, 0);
  Matrix core(nb, nb);
  for (std::size_t i = 0; i < nb; ++i) {
    core(i, i) = -1.0 / (1.0 + exponents[i]);
    for (std::size_t j = i + 1; j < nb; ++j) {
      const double v = 0.05 * rng.normal() * out.s_basis(i, j);
      core(i, j) = v;
      core(j, i) = v;
    }
  }
  const Matrix x = sym_inverse_sqrt(out.s_basis);
  const SymEig eig = jacobi_eigensolve(x * core * x);
  out.c = x * eig.vectors;
  out.eps = eig.values;
  out.rotation = Matrix::identity(nb);
  return out;
}

PretrainResult pretrain_fit(const ExcitedPfaffianModel& model, const PretrainTarget& target,
                            const PretrainOptions& options, const ParamVector& initial_params) {
  PretrainResult result;
  result.params = initial_params;
  ChainState chain = init_chain(model, result.params, 0, options.n_walkers, options.seed);

  const std::vector<std::string> orbital_slices = {"w_up", "w_down", "alpha"};
  constexpr double kFd = 1e-5;

  for (int step = 0; step < options.steps; ++step) {
    for (int d = 0; d < options.decorr_steps; ++d) mh_step(chain, model, result.params, 0);

    // optimal rotation from the pooled cross-correlation of model orbitals
    // against the target orbitals
    auto rotation_and_loss = [&](const ParamVector& p, const Matrix* fixed_r,
                                 Matrix* r_out) {
      Matrix cross(static_cast<std::size_t>(model.n_orb()), target.c.cols());
      std::vector<Matrix> phis, refs;
      for (const Configuration& cfg : chain.walkers) {
        Matrix phi = model.orbital_matrix(p, cfg, 0);
        Matrix ref = target_orbitals(target, cfg);
        cross = cross + phi.transpose() * ref;
        phis.push_back(std::move(phi));
        refs.push_back(std::move(ref));
      }
      Matrix r;
      if (fixed_r) {
        r = *fixed_r;
      } else {
        r = procrustes_from_cross(cross).rotation;
      }
      if (r_out) *r_out = r;
      double loss = 0.0;
      for (std::size_t i = 0; i < phis.size(); ++i) {
        const Matrix diff = phis[i] * r - refs[i];
        const double f = diff.frobenius_norm();
        loss += f * f;
      }
      return loss / static_cast<double>(phis.size());
    };

    Matrix r_star;
    result.loss_mo = rotation_and_loss(result.params, nullptr, &r_star);

    std::vector<double> grad(result.params.size(), 0.0);
    // envelope theorem: R* is optimal, so it is held fixed while the orbital
    // parameters move
    ParamVector probe = result.params;
    for (const std::string& name : orbital_slices) {
      const ParamSlice& slice = result.params.layout().slice(name);
      for (std::size_t k = 0; k < slice.size; ++k) {
        const std::size_t p = slice.offset + k;
        const double orig = probe[p];
        probe[p] = orig + kFd;
        const double up = rotation_and_loss(probe, &r_star, nullptr);
        probe[p] = orig - kFd;
        const double down = rotation_and_loss(probe, &r_star, nullptr);
        probe[p] = orig;
        grad[p] = (up - down) / (2.0 * kFd);
      }
    }

    // antisymmetrizer loss: snap A_s toward the rotated, SVD-projected
    // selector block; the projected target is a constant for the gradient
    result.loss_a = 0.0;
    for (int s = 0; s < model.n_states() && s < static_cast<int>(target.selectors.size()); ++s) {
      const Matrix pi = target.selectors[static_cast<std::size_t>(s)].to_matrix(model.n_orb());
      const Matrix a_dense = model.antisymmetrizer(result.params, s, 0);
      const Matrix block = pi.transpose() * (r_star.transpose() * a_dense * r_star) * pi;
      const ProcrustesResult proj = procrustes_from_cross(block);
      if (proj.degenerate) ++result.degenerate_svd_count;
      // nearest orthogonal skew target: antisymmetrize the polar factor
      Matrix a_tilde = (proj.rotation - proj.rotation.transpose()) * 0.5;
      const Matrix a_target = r_star * pi * a_tilde * pi.transpose() * r_star.transpose();
      const Matrix diff = a_dense - a_target;
      const double f = diff.frobenius_norm();
      result.loss_a += f * f;
      const ParamSlice& slice =
          result.params.layout().slice(ExcitedPfaffianModel::a_slice_name(s));
      // d||A - T||^2 / dA_pq over the strict upper triangle, both (p,q) and
      // (q,p) entries move together
      std::size_t idx = 0;
      const std::size_t n_orb = static_cast<std::size_t>(model.n_orb());
      for (std::size_t p = 0; p < n_orb; ++p)
        for (std::size_t q = p + 1; q < n_orb; ++q, ++idx)
          grad[slice.offset + idx] += 2.0 * (diff(p, q) - diff(q, p));
    }

    for (std::size_t p = 0; p < grad.size(); ++p) result.params[p] -= options.lr * grad[p];
  }
  return result;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.data() = j.at("data").get<std::vector<double>>();
  return m;
}

}  // namespace

std::string structures_to_json(const std::vector<Structure>& structures) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Structure& s : structures) {
    nlohmann::json j;
    j["id"] = s.id;
    nlohmann::json nuclei = nlohmann::json::array();
    for (const auto& nuc : s.nuclei) nuclei.push_back({nuc[0], nuc[1], nuc[2]});
    j["nuclei"] = nuclei;
    j["charges"] = s.charges;
    j["C"] = matrix_to_json(s.c);
    j["S_basis"] = matrix_to_json(s.s_basis);
    j["eps"] = s.eps;
    if (s.parent_id >= 0) {
      j["parent_id"] = s.parent_id;
      j["rotation"] = matrix_to_json(s.rotation);
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::vector<Structure> structures_from_json(const std::string& text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<Structure> out;
  for (const nlohmann::json& j : arr) {
    Structure s;
    s.id = j.at("id").get<int>();
    for (const nlohmann::json& nuc : j.at("nuclei"))
      s.nuclei.push_back({nuc.at(0).get<double>(), nuc.at(1).get<double>(), nuc.at(2).get<double>()});
    s.charges = j.at("charges").get<std::vector<double>>();
    s.c = matrix_from_json(j.at("C"));
    s.s_basis = matrix_from_json(j.at("S_basis"));
    s.eps = j.at("eps").get<std::vector<double>>();
    if (j.contains("parent_id")) {
      s.parent_id = j.at("parent_id").get<int>();
      s.rotation = matrix_from_json(j.at("rotation"));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string selectors_to_json(const std::vector<Selector>& selectors) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t s = 0; s < selectors.size(); ++s)
    arr.push_back({{"state", s}, {"occupied", selectors[s].occupied}});
  return arr.dump(2);
}

std::vector<Selector> selectors_from_json(const std::string& text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<Selector> out(arr.size());
  for (const nlohmann::json& j : arr) {
    const std::size_t s = j.at("state").get<std::size_t>();
    if (s >= out.size()) throw std::runtime_error("selectors: state index out of range");
    out[s].occupied = j.at("occupied").get<std::vector<int>>();
  }
  return out;
}

}  // namespace mvmc
