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

#include "doctest.h"

#include <cmath>

#include "stabsim/error.hpp"
#include "stabsim/trotter.hpp"

using namespace stabsim;

namespace {

LocalHamiltonian z_field(int n) {
  std::vector<CustomTerm> terms;
  for (int i = 0; i < n; ++i) terms.push_back({{i}, {PauliTerm{"Z", {{i}}, 1.0}}});
  return custom_hamiltonian(LatticeSpec::chain(n), terms);
}

}  // namespace

TEST_CASE("suzuki_p and the fourth-order plan") {
  CHECK(suzuki_p(1) == doctest::Approx(0.4144908).epsilon(1e-7));
  const TrotterPlan p4 = suzuki_plan(4, 1);
  REQUIRE(p4.upsilon() == 10);
  // central S2 carries 1 - 4 P_1
  CHECK(p4.stages[4].coeff + p4.stages[5].coeff == doctest::Approx(-0.6579631).epsilon(1e-7));
}

TEST_CASE("second-order plan") {
  const TrotterPlan p2 = suzuki_plan(2, 3);
  REQUIRE(p2.upsilon() == 2);
  CHECK(p2.stages[0].coeff == 0.5);
  CHECK(p2.stages[0].ordering == Ordering::Forward);
  CHECK(p2.stages[1].coeff == 0.5);
  CHECK(p2.stages[1].ordering == Ordering::Reverse);
}

TEST_CASE("plan invariants up to order 8") {
  for (int p : {2, 4, 6, 8}) {
    const TrotterPlan plan = suzuki_plan(p, 1);
    CHECK(plan.coefficient_sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(plan.is_symmetric());
    CHECK(plan.upsilon() == 2 * static_cast<int>(std::pow(5, p / 2 - 1)));
    const TrotterPlan inv = plan.inverse();
    CHECK(inv.coefficient_sum() == doctest::Approx(-1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(suzuki_plan(3, 1), DomainError);
  CHECK_THROWS_AS(suzuki_plan(0, 1), DomainError);
}

TEST_CASE("inverse plan undoes one step") {
  const LocalHamiltonian ham = transverse_field_ising(LatticeSpec::chain(4), 1.0, 0.7);
  const TruncatedHamiltonian t(ham, Observable::pauli("Z", {{0}}), 4);
  const TrotterPlan plan = suzuki_plan(4, 1);
  const Mat U = product_unitary(plan, t, 0.3);
  const Mat W = product_unitary(plan.inverse(), t, 0.3);
  CHECK((W * U - Mat::Identity(16, 16)).norm() < 1e-12);
}

TEST_CASE("commuting terms are reproduced exactly") {
  const TruncatedHamiltonian t(z_field(3), Observable::pauli("Z", {{0}}), 4);
  const Mat exact = expm_i_hermitian(assemble_dense(t), 1.3);
  for (int p : {2, 4})
    for (int n : {1, 3}) CHECK((product_unitary(suzuki_plan(p, n), t, 1.3) - exact).norm() < 1e-10);
  CHECK(nested_commutator_exact(t, 2) == 0.0);
}

TEST_CASE("single term is exact at n=1") {
  const LocalHamiltonian ham =
      custom_hamiltonian(LatticeSpec::chain(2), {CustomTerm{{0}, {PauliTerm{"XY", {{0}, {1}}, 1.0}}}});
  const TruncatedHamiltonian t(ham, Observable::pauli("Z", {{0}}), 2);
  const Mat U = product_unitary(suzuki_plan(2, 1), t, 0.9);
  CHECK((U - expm_i_hermitian(assemble_dense(t), 0.9)).norm() < 1e-12);
}

TEST_CASE("nested commutator of two overlapping terms") {
  const LocalHamiltonian ham =
      custom_hamiltonian(LatticeSpec::chain(2), {CustomTerm{{0}, {PauliTerm{"XX", {{0}, {1}}, 1.0}}},
                                                  CustomTerm{{1}, {PauliTerm{"Z", {{1}}, 1.0}}}});
  const TruncatedHamiltonian t(ham, Observable::pauli("Z", {{0}}), 2);
  // [Z1, X0X1] and [X0X1, Z1] each have norm 2
  CHECK(nested_commutator_exact(t, 2) == doctest::Approx(4.0));
  CHECK(nested_commutator_exact(t, 2) <= nested_commutator_bound(t, 2));
}

TEST_CASE("nested commutator bound dominates the exact sum") {
  const LocalHamiltonian ham = transverse_field_ising(LatticeSpec::chain(6), 1.0, 1.0);
  const TruncatedHamiltonian t(ham, Observable::pauli("Z", {{2}}), 2);
  for (int depth : {2, 3}) CHECK(nested_commutator_exact(t, depth) <= nested_commutator_bound(t, depth));
}

TEST_CASE("trotter_error_report") {
  const LocalHamiltonian ham = transverse_field_ising(LatticeSpec::chain(4), 1.0, 1.0);
  const TruncatedHamiltonian t(ham, Observable::pauli("Z", {{1}}), 4);
  const TrotterErrorReport r16 = trotter_error_report(suzuki_plan(2, 16), t, 1.0);
  REQUIRE(r16.exact_error.has_value());
  CHECK(*r16.exact_error <= r16.bound_rhs);
  const TrotterErrorReport r64 = trotter_error_report(suzuki_plan(2, 64), t, 1.0);
  CHECK(r16.bound_rhs / r64.bound_rhs == doctest::Approx(16.0));

  const TrotterErrorReport zero = trotter_error_report(suzuki_plan(2, 4), t, 0.0);
  CHECK(*zero.exact_error < 1e-12);
  CHECK(zero.bound_rhs == 0.0);
}

TEST_CASE("trotter constant K in one dimension") {
  const LocalityConstants c = LocalityConstants::make(1, 1, 0);
  // 2^2 (2*2*1)^2 * 1 / 3! = 64/6
  CHECK(trotter_constant_K(2, c) == doctest::Approx(64.0 / 6.0));
}

TEST_CASE("product unitaries stay unitary") {
  const LocalHamiltonian ham = heisenberg(LatticeSpec(2, {2, 3}), 1.0, 0.3);
  const TruncatedHamiltonian t(ham, Observable::pauli("X", {{0, 0}}), 4);
  for (int p : {2, 4, 6}) CHECK(is_unitary(product_unitary(suzuki_plan(p, 5), t, 2.0), 1e-9));
}

TEST_CASE("product_state matches product_unitary") {
  const LocalHamiltonian ham = transverse_field_ising(LatticeSpec::chain(5), 1.0, 0.4);
  const TruncatedHamiltonian t(ham, Observable::pauli("Z", {{2}}), 1);
  const Vec psi0 = initial_state("y", t.n_qubits());
  const TrotterPlan plan = suzuki_plan(4, 3);
  CHECK((product_state(plan, t, 0.8, psi0) - product_unitary(plan, t, 0.8) * psi0).norm() < 1e-12);
}
