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

#include <array>
#include <string>

#include "mvmc/ansatz.hpp"
#include "mvmc/svd.hpp"

namespace mvmc {

/// One geometry with its orbital payload.
struct Structure {
  int id = 0;
  std::vector<std::array<double, 3>> nuclei;
  std::vector<double> charges;
  Matrix c;        // basis coefficients, n_basis x n_orb
  Matrix s_basis;  // basis overlap
  std::vector<double> eps;

  // filled by propagation
  int parent_id = -1;
  Matrix rotation;
};

/// Orbital selector: n_orb x n_elec zero-one matrix stored as the occupied
/// orbital index per electron slot, kept sorted.
struct Selector {
  std::vector<int> occupied;

  Matrix to_matrix(int n_orb) const;
};

/// det(Pi_s^T Pi_t) computed exactly in integer arithmetic; +-1 iff the
/// occupation sets coincide, 0 otherwise.
int selector_det(const Selector& a, const Selector& b);

struct StructureGraph {
  std::vector<std::pair<int, int>> edges;  // MST edges as structure indices
  int root = 0;
  std::vector<int> order;   // breadth-first from root
  std::vector<int> parent;  // parent index per node, -1 at root
};

/// Plain RMSD of nuclear positions; optional Kabsch superposition first.
double rmsd(const Structure& a, const Structure& b, bool kabsch = false);

/// Kruskal MST over pairwise RMSD, rooted at the node of minimum
/// eccentricity in edge counts (ties to the lowest id).
StructureGraph build_graph(const std::vector<Structure>& structures);

/// Gaussian KDE grouping of orbital energies; returns a group id per
/// orbital, contiguous in sorted energy order.
std::vector<int> cluster_orbital_energies(const std::vector<double>& eps, double bandwidth);

struct AlignResult {
  Matrix c;         // rotated coefficients
  Matrix rotation;  // block-diagonal orthogonal rotation applied
  bool degenerate = false;
};

/// Per-group orthogonal Procrustes on the cross-overlap M = C_child^T
/// S_cross C_parent; columns only mix inside their energy group.
AlignResult blockwise_align(const Matrix& c_child, const Matrix& c_parent, const Matrix& s_cross,
                            const std::vector<int>& groups);

/// Walks the tree in topological order, projecting each parent's coefficients
/// into the child basis by symmetric orthogonalization and aligning the
/// child's own orbitals to them block-wise. Mutates c/parent_id/rotation.
void propagate_orbitals(const StructureGraph& graph, std::vector<Structure>& structures,
                        double bandwidth = 0.5);

/// Pi_0 occupies the lowest n_elec orbitals; each further state applies its
/// (from, to) excitations. Throws on duplicate occupation sets.
std::vector<Selector> selector_set(int n_orb, int n_elec,
                                   const std::vector<std::vector<std::pair<int, int>>>& excitations);

/// Synthetic Gaussian-basis target playing the role of reference orbitals.
struct PretrainTarget {
  std::vector<std::array<double, 3>> centers;  // one per basis function
  std::vector<double> exponents;
  Matrix c;  // n_basis x n_orb
  std::vector<Selector> selectors;
};

/// Reference orbital matrix at a configuration: Gaussians times C.
Matrix target_orbitals(const PretrainTarget& target, const Configuration& config);

/// Analytic overlap of unnormalized s-Gaussians exp(-a|r-A|^2).
double gaussian_overlap(double a, const std::array<double, 3>& ca, double b,
                        const std::array<double, 3>& cb);

struct SynthHfSpec {
  int id = 0;
  std::vector<std::array<double, 3>> nuclei;
  std::vector<double> charges;
  std::vector<double> exponent_ladder = {0.5, 1.0, 2.0, 4.0};
  std::uint64_t seed = 0;
};

/// Deterministic stand-in for a Hartree-Fock solver: analytic Gaussian
/// overlap, a seeded symmetric core matrix, and its S-orthonormal
/// eigenvectors as orbitals with the eigenvalues as energies.
Structure synth_hf(const SynthHfSpec& spec);

struct PretrainOptions {
  int steps = 500;
  int n_walkers = 64;
  int decorr_steps = 5;
  double lr = 0.05;
  std::uint64_t seed = 0;
};

struct PretrainResult {
  ParamVector params;
  double loss_mo = 0.0;
  double loss_a = 0.0;
  int degenerate_svd_count = 0;
};

/// Procrustes pretraining: fits the model's orbital matrix to the target
/// orbitals through the optimal rotation R* (orbital loss) and snaps each
/// state's antisymmetrizer to the rotated selector block (antisymmetrizer
/// loss, with the SVD-projected target treated as a constant).
PretrainResult pretrain_fit(const ExcitedPfaffianModel& model, const PretrainTarget& target,
                            const PretrainOptions& options, const ParamVector& initial_params);

// structure payload serialization, schema shared with external producers
std::string structures_to_json(const std::vector<Structure>& structures);
std::vector<Structure> structures_from_json(const std::string& text);
std::string selectors_to_json(const std::vector<Selector>& selectors);
std::vector<Selector> selectors_from_json(const std::string& text);

}  // namespace mvmc
