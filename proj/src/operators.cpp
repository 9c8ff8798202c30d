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

#include "stabsim/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

#include "stabsim/error.hpp"

namespace stabsim {

namespace {

std::vector<int> positions_in(const Region& sub, const Region& target) {
  std::vector<int> pos;
  pos.reserve(sub.size());
  for (const auto& s : sub.sites()) {
    const int i = target.index_of(s);
    if (i < 0) throw DomainError("site " + site_to_string(s) + " not in target region");
    pos.push_back(i);
  }
  return pos;
}

// Common rescaling so that every term has norm <= 1.
double normalize_terms(std::vector<LocalTerm>& terms) {
  double max_norm = 0.0;
  for (const auto& t : terms) max_norm = std::max(max_norm, operator_norm(t.matrix));
  if (max_norm <= 1.0) return 1.0;
  for (auto& t : terms) t.matrix /= max_norm;
  return max_norm;
}

LocalTerm term_from_paulis(const Site& anchor, const std::vector<PauliTerm>& paulis) {
  LocalOperator op = from_paulis(paulis);
  return {anchor, op.support, op.matrix};
}

std::vector<Site> forward_neighbours(const LatticeSpec& lattice, const Site& x) {
  std::vector<Site> out;
  for (int k = 0; k < lattice.d; ++k) {
    Site y = x;
    ++y[k];
    if (lattice.contains(y)) out.push_back(y);
  }
  return out;
}

}  // namespace

LocalOperator from_paulis(const std::vector<PauliTerm>& terms) {
  if (terms.empty()) throw DomainError("from_paulis: no terms");
  std::vector<Site> all;
  for (const auto& p : terms) {
    if (p.ops.size() != p.sites.size()) throw DomainError("Pauli term: ops and sites differ in length");
    all.insert(all.end(), p.sites.begin(), p.sites.end());
  }
  Region support(all);
  const int n = static_cast<int>(support.size());
  if (n > kMaxQubits) throw CapacityError("from_paulis: support exceeds 12 qubits");
  Mat m = Mat::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (const auto& p : terms) {
    if (Region(p.sites).size() != p.sites.size()) throw DomainError("Pauli term: repeated site");
    std::string full(n, 'I');
    for (std::size_t k = 0; k < p.ops.size(); ++k) full[support.index_of(p.sites[k])] = p.ops[k];
    m += p.weight * pauli_string(full);
  }
  return {support, m};
}

Mat extend(const LocalOperator& op, const Region& target) {
  return embed(op.matrix, positions_in(op.support, target), static_cast<int>(target.size()));
}

LocalOperator local_commutator(const LocalOperator& a, const LocalOperator& b) {
  const Region u = a.support.united(b.support);
  const Mat A = extend(a, u);
  const Mat B = extend(b, u);
  return {u, commutator(A, B)};
}

Observable::Observable(Region support_, Mat matrix_) : support(std::move(support_)), matrix(std::move(matrix_)) {
  if (support.empty()) throw DomainError("observable: empty support");
  const Eigen::Index dim = Eigen::Index{1} << support.size();
  if (matrix.rows() != dim || matrix.cols() != dim) throw DomainError("observable: matrix dimension mismatch");
  if (!is_hermitian(matrix)) throw DomainError("observable: matrix is not Hermitian");
  norm = operator_norm(matrix);
  radius = std::numeric_limits<int>::max();
  for (const auto& c : support.sites()) {
    int r = 0;
    for (const auto& y : support.sites()) r = std::max(r, l1_distance(c, y));
    if (r < radius) {
      radius = r;
      center = c;
    }
  }
}

Observable Observable::pauli(const std::string& ops, const std::vector<Site>& sites) {
  LocalOperator op = from_paulis({PauliTerm{ops, sites, 1.0}});
  return Observable(op.support, op.matrix);
}

LocalHamiltonian::LocalHamiltonian(LatticeSpec lattice, std::vector<LocalTerm> terms, ModelInfo info)
    : lattice_(std::move(lattice)), terms_(std::move(terms)), info_(std::move(info)) {
  std::set<Site> anchors;
  R_ = 1;
  for (const auto& t : terms_) {
    if (!lattice_.contains(t.anchor)) throw DomainError("term anchor " + site_to_string(t.anchor) + " outside lattice");
    if (!anchors.insert(t.anchor).second)
      throw DomainError("more than one term anchored at " + site_to_string(t.anchor));
    if (t.support.empty()) throw DomainError("term with empty support");
    for (const auto& s : t.support.sites()) {
      if (!lattice_.contains(s)) throw DomainError("term support site " + site_to_string(s) + " outside lattice");
      R_ = std::max(R_, l1_distance(t.anchor, s));
    }
    const Eigen::Index dim = Eigen::Index{1} << t.support.size();
    if (t.matrix.rows() != dim || t.matrix.cols() != dim) throw DomainError("term matrix dimension mismatch");
    if (!is_hermitian(t.matrix)) throw DomainError("term matrix is not Hermitian");
    if (operator_norm(t.matrix) > 1.0 + 1e-12) throw DomainError("term norm exceeds 1");
  }
}

LocalityConstants LocalHamiltonian::constants(const Observable& obs) const {
  return LocalityConstants::make(lattice_.d, R_, obs.radius);
}

LocalHamiltonian transverse_field_ising(const LatticeSpec& lattice, double J, double h) {
  std::vector<LocalTerm> terms;
  for (const auto& x : lattice.sites()) {
    std::vector<PauliTerm> p;
    for (const auto& y : forward_neighbours(lattice, x)) p.push_back({"ZZ", {x, y}, J});
    p.push_back({"X", {x}, h});
    terms.push_back(term_from_paulis(x, p));
  }
  ModelInfo info{"tfim", {{"J", J}, {"field", h}}, 1.0};
  info.norm_scale = normalize_terms(terms);
  return LocalHamiltonian(lattice, std::move(terms), info);
}

LocalHamiltonian heisenberg(const LatticeSpec& lattice, double J, double h) {
  std::vector<LocalTerm> terms;
  for (const auto& x : lattice.sites()) {
    std::vector<PauliTerm> p;
    for (const auto& y : forward_neighbours(lattice, x))
      for (const char* op : {"XX", "YY", "ZZ"}) p.push_back({op, {x, y}, J});
    p.push_back({"Z", {x}, h});
    terms.push_back(term_from_paulis(x, p));
  }
  ModelInfo info{"heisenberg", {{"J", J}, {"field", h}}, 1.0};
  info.norm_scale = normalize_terms(terms);
  return LocalHamiltonian(lattice, std::move(terms), info);
}

LocalHamiltonian custom_hamiltonian(const LatticeSpec& lattice, const std::vector<CustomTerm>& custom) {
  std::vector<LocalTerm> terms;
  for (const auto& c : custom) terms.push_back(term_from_paulis(c.anchor, c.paulis));
  ModelInfo info{"custom", {}, 1.0};
  info.norm_scale = normalize_terms(terms);
  return LocalHamiltonian(lattice, std::move(terms), info);
}

TruncatedHamiltonian::TruncatedHamiltonian(const LocalHamiltonian& ham, const Observable& obs, int l)
    : l_(l), lattice_(ham.lattice()), constants_(ham.constants(obs)) {
  if (l < 0) throw DomainError("truncate: l must be >= 0");
  for (const auto& s : obs.support.sites())
    if (!lattice_.contains(s)) throw DomainError("observable site " + site_to_string(s) + " outside lattice");
  omega_ = omega_region(obs.support, l, lattice_);
  Region region = obs.support;
  const auto& all = ham.terms();
  for (std::size_t g = 0; g < all.size(); ++g) {
    if (!all[g].support.intersects(omega_)) continue;
    theta_.push_back(static_cast<int>(g));
    terms_.push_back(all[g]);
    region = region.united(all[g].support);
  }
  if (region.size() > static_cast<std::size_t>(kMaxQubits)) {
    int feasible = -1;
    for (int l2 = l - 1; l2 >= 0 && feasible < 0; --l2) {
      Region r = obs.support;
      const Region om = omega_region(obs.support, l2, lattice_);
      for (const auto& t : all)
        if (t.support.intersects(om)) r = r.united(t.support);
      if (r.size() <= static_cast<std::size_t>(kMaxQubits)) feasible = l2;
    }
    throw CapacityError("truncate: l=" + std::to_string(l) + " needs " + std::to_string(region.size()) +
                        " qubits (cap 12); reduce l to at most " + std::to_string(feasible));
  }
  region_ = std::move(region);
  for (const auto& t : terms_) positions_.push_back(positions_in(t.support, region_));
}

std::vector<int> TruncatedHamiltonian::positions_of(const Region& r) const {
  if (!r.subset_of(region_)) throw DomainError("support is not contained in the truncated region");
  return positions_in(r, region_);
}

TruncatedHamiltonian truncate(const LocalHamiltonian& ham, const Observable& obs, int l) {
  return TruncatedHamiltonian(ham, obs, l);
}

Mat assemble_dense(const TruncatedHamiltonian& trunc) {
  const int n = trunc.n_qubits();
  const std::size_t dim = trunc.dim();
  Mat H = Mat::Zero(dim, dim);
  for (std::size_t k = 0; k < trunc.n_terms(); ++k) H += embed(trunc.term(k).matrix, trunc.positions(k), n);
  return (0.5 * (H + H.adjoint())).eval();
}

Mat embed_observable(const Observable& obs, const TruncatedHamiltonian& trunc) {
  return embed(obs.matrix, trunc.positions_of(obs.support), trunc.n_qubits());
}

Mat embed_term_sum(const TruncatedHamiltonian& trunc, const std::vector<Mat>& ops) {
  if (ops.size() != trunc.n_terms()) throw DomainError("embed_term_sum: one operator per term required");
  Mat S = Mat::Zero(trunc.dim(), trunc.dim());
  for (std::size_t k = 0; k < ops.size(); ++k) S += embed(ops[k], trunc.positions(k), trunc.n_qubits());
  return S;
}

Ensemble parse_ensemble(const std::string& name) {
  if (name == "gue_normalized") return Ensemble::GueNormalized;
  if (name == "pauli_rademacher") return Ensemble::PauliRademacher;
  throw ConfigError("unknown perturbation ensemble '" + name + "'");
}

std::string to_string(Ensemble e) {
  return e == Ensemble::GueNormalized ? "gue_normalized" : "pauli_rademacher";
}

Mat sample_perturbation(Ensemble ensemble, int n_qubits, Rng& rng) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw DomainError("sample_perturbation: bad qubit count");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (ensemble == Ensemble::PauliRademacher) {
    std::uniform_int_distribution<std::uint64_t> pick(1, (std::uint64_t{1} << (2 * n_qubits)) - 1);
    std::uint64_t code = pick(rng);
    const bool negative = std::bernoulli_distribution(0.5)(rng);
    std::string ops(n_qubits, 'I');
    for (int k = n_qubits - 1; k >= 0; --k) {
      ops[k] = "IXYZ"[code & 3];
      code >>= 2;
    }
    Mat P = pauli_string(ops);
    return negative ? Mat(-P) : P;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat A(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      A(r, c) = cplx(re, im);
    }
  Mat H = 0.5 * (A + A.adjoint());
  const double nrm = operator_norm(H);
  if (nrm == 0.0) throw NumericalError("sample_perturbation: degenerate draw");
  return H / nrm;
}

Vec initial_state(const std::string& kind, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw DomainError("initial_state: bad qubit count");
  Vec one(2);
  Vec psi = Vec::Ones(1);
  for (int k = 0; k < n_qubits; ++k) {
    if (kind == "zero")
      one << 1, 0;
    else if (kind == "plus")
      one << M_SQRT1_2, M_SQRT1_2;
    else if (kind == "y")
      one << M_SQRT1_2, cplx(0, M_SQRT1_2);
    else if (kind == "neel")
      one << (k % 2 == 0 ? 1 : 0), (k % 2 == 0 ? 0 : 1);
    else
      throw ConfigError("unknown initial state '" + kind + "'");
    psi = Eigen::kroneckerProduct(psi, one).eval();
  }
  return psi;
}

}  // namespace stabsim
