// Copyright 2026 The stabsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "stabsim/lattice.hpp"
#include "stabsim/linalg.hpp"
#include "stabsim/rng.hpp"

namespace stabsim {

// weight * ops[0] (x) ops[1] (x) ... acting on sites[0], sites[1], ...
struct PauliTerm {
  std::string ops;
  std::vector<Site> sites;
  double weight = 1.0;
};

struct LocalOperator {
  Region support;
  Mat matrix;
};

LocalOperator from_paulis(const std::vector<PauliTerm>& terms);
// Matrix of op on the (larger) region target, identity on the extra sites.
Mat extend(const LocalOperator& op, const Region& target);
LocalOperator local_commutator(const LocalOperator& a, const LocalOperator& b);

struct LocalTerm {
  Site anchor;
  Region support;
  Mat matrix;
};

struct Observable {
  Region support;
  Mat matrix;
  double norm = 0.0;
  Site center;
  int radius = 0;  // R_O

  Observable() = default;
  Observable(Region support, Mat matrix);
  // Tensor product of the single-qubit Pauli ops[k] on sites[k].
  static Observable pauli(const std::string& ops, const std::vector<Site>& sites);
};

struct ModelInfo {
  std::string name = "custom";
  std::map<std::string, double> raw_couplings;
  double norm_scale = 1.0;  // raw terms were divided by this
};

class LocalHamiltonian {
 public:
  LocalHamiltonian(LatticeSpec lattice, std::vector<LocalTerm> terms, ModelInfo info = {});

  const LatticeSpec& lattice() const { return lattice_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  const ModelInfo& info() const { return info_; }
  int interaction_radius() const { return R_; }
  LocalityConstants constants(const Observable& obs) const;

 private:
  LatticeSpec lattice_;
  std::vector<LocalTerm> terms_;
  ModelInfo info_;
  int R_ = 1;
};

// Term anchored at x: J sum_k Z_x Z_{x+e_k} + h X_x.
LocalHamiltonian transverse_field_ising(const LatticeSpec& lattice, double J, double h);
// Term anchored at x: J sum_k (XX + YY + ZZ)_{x,x+e_k} + h Z_x.
LocalHamiltonian heisenberg(const LatticeSpec& lattice, double J, double h);

struct CustomTerm {
  Site anchor;
  std::vector<PauliTerm> paulis;
};
LocalHamiltonian custom_hamiltonian(const LatticeSpec& lattice, const std::vector<CustomTerm>& terms);

class TruncatedHamiltonian {
 public:
  TruncatedHamiltonian(const LocalHamiltonian& ham, const Observable& obs, int l);

  int l() const { return l_; }
  // Indices into the parent's term list.
  const std::vector<int>& theta() const { return theta_; }
  std::size_t n_terms() const { return theta_.size(); }
  const Region& region() const { return region_; }
  const Region& omega() const { return omega_; }
  int n_qubits() const { return static_cast<int>(region_.size()); }
  std::size_t dim() const { return std::size_t{1} << region_.size(); }
  const LatticeSpec& lattice() const { return lattice_; }
  const LocalityConstants& constants() const { return constants_; }

  const LocalTerm& term(std::size_t k) const { return terms_[k]; }
  const std::vector<int>& positions(std::size_t k) const { return positions_[k]; }
  std::vector<int> positions_of(const Region& r) const;

 private:
  int l_;
  LatticeSpec lattice_;
  LocalityConstants constants_;
  std::vector<int> theta_;
  std::vector<LocalTerm> terms_;
  std::vector<std::vector<int>> positions_;
  Region omega_;
  Region region_;
};

TruncatedHamiltonian truncate(const LocalHamiltonian& ham, const Observable& obs, int l);
Mat assemble_dense(const TruncatedHamiltonian& trunc);
Mat embed_observable(const Observable& obs, const TruncatedHamiltonian& trunc);
// Embeds one operator per retained term; ops[k] lives on the support of term k.
Mat embed_term_sum(const TruncatedHamiltonian& trunc, const std::vector<Mat>& ops);

enum class Ensemble { GueNormalized, PauliRademacher };
Ensemble parse_ensemble(const std::string& name);
std::string to_string(Ensemble e);

// Mean-zero Hermitian draw with ||L|| <= 1 on n_qubits qubits.
Mat sample_perturbation(Ensemble ensemble, int n_qubits, Rng& rng);

// Product states: "zero", "plus", "y", "neel".
Vec initial_state(const std::string& kind, int n_qubits);

}  // namespace stabsim
