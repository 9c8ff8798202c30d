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

#include "stabsim/trotter.hpp"

#include <cmath>
#include <functional>

#include "stabsim/error.hpp"

namespace stabsim {

namespace {

constexpr std::size_t kExactCommutatorDim = 256;
constexpr std::size_t kExactErrorDim = 1024;

Ordering flipped(Ordering o) { return o == Ordering::Forward ? Ordering::Reverse : Ordering::Forward; }

std::vector<Stage> scaled(const std::vector<Stage>& s, double f) {
  std::vector<Stage> out = s;
  for (auto& st : out) st.coeff *= f;
  return out;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

double TrotterPlan::coefficient_sum() const {
  double s = 0.0;
  for (const auto& st : stages) s += st.coeff;
  return s;
}

TrotterPlan TrotterPlan::inverse() const {
  TrotterPlan inv = *this;
  inv.stages.assign(stages.rbegin(), stages.rend());
  for (auto& st : inv.stages) {
    st.coeff = -st.coeff;
    st.ordering = flipped(st.ordering);
  }
  return inv;
}

bool TrotterPlan::is_symmetric(double tol) const {
  const std::size_t u = stages.size();
  for (std::size_t i = 0; i < u; ++i) {
    const Stage& a = stages[i];
    const Stage& b = stages[u - 1 - i];
    if (std::abs(a.coeff - b.coeff) > tol || a.ordering != flipped(b.ordering)) return false;
  }
  return true;
}

double suzuki_p(int k) { return 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * k + 1.0))); }

TrotterPlan suzuki_plan(int p, int n) {
  if (p <= 0 || p % 2 != 0) throw DomainError("suzuki_plan: p must be a positive even integer");
  if (n < 1) throw DomainError("suzuki_plan: n must be >= 1");
  std::vector<Stage> s = {{0.5, Ordering::Forward}, {0.5, Ordering::Reverse}};
  for (int k = 1; 2 * k < p; ++k) {
    const double P = suzuki_p(k);
    const auto outer = scaled(s, P);
    const auto middle = scaled(s, 1.0 - 4.0 * P);
    std::vector<Stage> next;
    for (int rep = 0; rep < 2; ++rep) next.insert(next.end(), outer.begin(), outer.end());
    next.insert(next.end(), middle.begin(), middle.end());
    for (int rep = 0; rep < 2; ++rep) next.insert(next.end(), outer.begin(), outer.end());
    s = std::move(next);
  }
  return TrotterPlan{p, n, std::move(s)};
}

std::vector<GateRef> step_gates(const TrotterPlan& plan, std::size_t n_terms) {
  std::vector<GateRef> g;
  g.reserve(plan.stages.size() * n_terms);
  for (std::size_t u = 0; u < plan.stages.size(); ++u) {
    const Stage& st = plan.stages[u];
    for (std::size_t i = 0; i < n_terms; ++i) {
      const std::size_t k = st.ordering == Ordering::Forward ? i : n_terms - 1 - i;
      g.push_back({static_cast<int>(u), k, st.coeff});
    }
  }
  return g;
}

TermSpectra::TermSpectra(const TruncatedHamiltonian& trunc) {
  eig_.reserve(trunc.n_terms());
  for (std::size_t k = 0; k < trunc.n_terms(); ++k) eig_.push_back(eig_hermitian(trunc.term(k).matrix));
}

Mat product_unitary(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t) {
  const TermSpectra spectra(trunc);
  const auto gates = step_gates(plan, trunc.n_terms());
  const double h = t / plan.n;
  std::vector<Mat> local;
  local.reserve(gates.size());
  for (const auto& g : gates) local.push_back(spectra.gate(g.term, h * g.coeff));
  Mat U = Mat::Identity(trunc.dim(), trunc.dim());
  for (int j = 0; j < plan.n; ++j)
    for (std::size_t i = 0; i < gates.size(); ++i) apply_local(local[i], trunc.positions(gates[i].term), trunc.n_qubits(), U);
  return U;
}

Vec product_state(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t, const Vec& psi0) {
  const TermSpectra spectra(trunc);
  const auto gates = step_gates(plan, trunc.n_terms());
  const double h = t / plan.n;
  std::vector<Mat> local;
  local.reserve(gates.size());
  for (const auto& g : gates) local.push_back(spectra.gate(g.term, h * g.coeff));
  Vec psi = psi0;
  for (int j = 0; j < plan.n; ++j)
    for (std::size_t i = 0; i < gates.size(); ++i)
      apply_local(local[i], trunc.positions(gates[i].term), trunc.n_qubits(), psi);
  return psi;
}

double nested_commutator_exact(const TruncatedHamiltonian& trunc, int depth) {
  if (depth < 1) throw DomainError("nested_commutator: depth must be >= 1");
  if (trunc.dim() > kExactCommutatorDim) throw CapacityError("nested_commutator: exact mode needs dim <= 256");
  std::vector<LocalOperator> H;
  for (std::size_t k = 0; k < trunc.n_terms(); ++k) H.push_back({trunc.term(k).support, trunc.term(k).matrix});
  double total = 0.0;
  std::function<void(const LocalOperator&, int)> walk = [&](const LocalOperator& C, int level) {
    if (level == depth) {
      total += operator_norm(C.matrix);
      return;
    }
    for (const auto& h : H) {
      if (!h.support.intersects(C.support)) continue;
      LocalOperator next = local_commutator(h, C);
      if (next.matrix.cwiseAbs().maxCoeff() < 1e-14) continue;
      walk(next, level + 1);
    }
  };
  for (const auto& h : H) walk(h, 1);
  return total;
}

double nested_commutator_bound(const TruncatedHamiltonian& trunc, int depth) {
  if (depth < 1) throw DomainError("nested_commutator: depth must be >= 1");
  const auto& c = trunc.constants();
  const double q = depth;
  const double ball = c.Lambda_d * std::pow(2.0, c.d) * std::pow(static_cast<double>(c.R), c.d);
  return std::pow(2.0, q) * std::pow(ball, q - 1) * std::pow(factorial(depth - 1), c.d) *
         static_cast<double>(trunc.n_terms());
}

double trotter_constant_K(int p, const LocalityConstants& c) {
  const double ball = c.Lambda_d * std::pow(2.0, c.d) * std::pow(static_cast<double>(c.R), c.d);
  return std::pow(2.0, p) * std::pow(ball, p) * std::pow(factorial(p - 1), c.d) / factorial(p + 1);
}

TrotterErrorReport trotter_error_report(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t) {
  TrotterErrorReport r;
  const int p = plan.p;
  const double scale = std::pow(std::abs(t), p + 1) / (std::pow(plan.n, p) * factorial(p + 1));
  r.bound_rhs = trotter_constant_K(p, trunc.constants()) * static_cast<double>(trunc.n_terms()) *
                std::pow(std::abs(t), p + 1) / std::pow(plan.n, p);
  if (trunc.dim() <= kExactErrorDim) {
    const Mat U = expm_i_hermitian(assemble_dense(trunc), t);
    r.exact_error = operator_norm(U - product_unitary(plan, trunc, t));
  }
  if (trunc.dim() <= kExactCommutatorDim)
    r.commutator_sum = nested_commutator_exact(trunc, p + 1) * scale;
  else
    r.commutator_sum = nested_commutator_bound(trunc, p + 1) * scale;
  return r;
}

}  // namespace stabsim
