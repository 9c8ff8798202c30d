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

#include <optional>
#include <vector>

#include "stabsim/linalg.hpp"
#include "stabsim/operators.hpp"

namespace stabsim {

enum class Ordering { Forward, Reverse };

struct Stage {
  double coeff = 0.0;
  Ordering ordering = Ordering::Forward;
};

// Even-order Suzuki formula repeated n times. Stages are listed in the order
// they act on the state.
struct TrotterPlan {
  int p = 2;
  int n = 1;
  std::vector<Stage> stages;

  int upsilon() const { return static_cast<int>(stages.size()); }
  double coefficient_sum() const;
  // Stage list of the inverse of one step: reversed, orderings flipped,
  // coefficients negated.
  TrotterPlan inverse() const;
  // Reversed list with flipped orderings equals the original.
  bool is_symmetric(double tol = 1e-14) const;
};

// P_k = 1 / (4 - 4^{1/(2k+1)}).
double suzuki_p(int k);
TrotterPlan suzuki_plan(int p, int n);

// Gate g of one Trotter step, in application order.
struct GateRef {
  int stage;
  std::size_t term;
  double coeff;
};
std::vector<GateRef> step_gates(const TrotterPlan& plan, std::size_t n_terms);

// Cached eigendecompositions of the retained terms.
class TermSpectra {
 public:
  explicit TermSpectra(const TruncatedHamiltonian& trunc);
  // exp(-i s H_k) on the term's support.
  Mat gate(std::size_t k, double s) const { return propagator(eig_[k], s); }

 private:
  std::vector<EigHermitian> eig_;
};

Mat product_unitary(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t);
Vec product_state(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t, const Vec& psi0);

// Sum over tuples of ||[H_{g_depth}, ..., [H_{g_2}, H_{g_1}]]||, pruned by
// support overlap.
double nested_commutator_exact(const TruncatedHamiltonian& trunc, int depth);
// 2^q (Lambda_d 2^d R^d)^{q-1} [(q-1)!]^d |Theta_l| with q = depth.
double nested_commutator_bound(const TruncatedHamiltonian& trunc, int depth);

// K = 2^p (Lambda_d 2^d R^d)^p [(p-1)!]^d / (p+1)!.
double trotter_constant_K(int p, const LocalityConstants& c);

struct TrotterErrorReport {
  std::optional<double> exact_error;
  double bound_rhs = 0.0;
  std::optional<double> commutator_sum;
};

TrotterErrorReport trotter_error_report(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t);

}  // namespace stabsim
