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
#include <numbers>

#include "stabsim/error.hpp"
#include "stabsim/linalg.hpp"
#include "stabsim/operators.hpp"
#include "stabsim/rng.hpp"

using namespace stabsim;

namespace {

Mat ket_bra(int i, int j, int dim) {
  Mat m = Mat::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

Mat random_hermitian(int dim, Rng& rng) {
  std::normal_distribution<double> g;
  Mat A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (A + A.adjoint());
}

}  // namespace

TEST_CASE("expm_i_hermitian: Euler identities") {
  const double pi = std::numbers::pi;
  CHECK((expm_i_hermitian(pauli('Z'), pi) + Mat::Identity(2, 2)).norm() < 1e-12);
  CHECK((expm_i_hermitian(pauli('X'), pi / 2) - cplx(0, -1) * pauli('X')).norm() < 1e-12);
  CHECK((expm_i_hermitian(pauli('Y'), 0.0) - Mat::Identity(2, 2)).norm() < 1e-15);
  CHECK_THROWS_AS(expm_i_hermitian(ket_bra(0, 1, 2), 1.0), DomainError);
}

TEST_CASE("expm_i_hermitian agrees with the general exponential") {
  Rng rng = make_rng(1, 0, Stream::kState);
  for (int dim : {2, 4, 8}) {
    const Mat H = random_hermitian(dim, rng);
    const Mat U = expm_i_hermitian(H, 0.37);
    CHECK(is_unitary(U));
    CHECK((U - expm_general(cplx(0, -0.37) * H)).norm() < 1e-10);
  }
}

TEST_CASE("eig_hermitian reconstructs and sorts") {
  Rng rng = make_rng(2, 0, Stream::kState);
  const Mat H = random_hermitian(16, rng);
  const EigHermitian e = eig_hermitian(H);
  const Mat back = e.eigenvectors * e.eigenvalues.cast<cplx>().asDiagonal() * e.eigenvectors.adjoint();
  CHECK((back - H).norm() <= 1e-10 * 16);
  for (int i = 1; i < 16; ++i) CHECK(e.eigenvalues(i) >= e.eigenvalues(i - 1));
}

TEST_CASE("operator_norm examples") {
  CHECK(operator_norm(pauli('X')) == doctest::Approx(1.0));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = -4;
  CHECK(operator_norm(d) == doctest::Approx(4.0));
  CHECK(operator_norm(2.0 * ket_bra(0, 1, 2)) == doctest::Approx(2.0));
}

TEST_CASE("trace_distance examples") {
  const Mat r0 = ket_bra(0, 0, 2), r1 = ket_bra(1, 1, 2);
  CHECK(trace_distance(r0, r0) == doctest::Approx(0.0));
  CHECK(trace_distance(r0, r1) == doctest::Approx(2.0));
  CHECK(trace_distance(r0, Mat(0.5 * Mat::Identity(2, 2))) == doctest::Approx(1.0));
  CHECK_THROWS_AS(trace_distance(r0, Mat(2.0 * r1)), DomainError);
}

TEST_CASE("trace_norm of a Hermitian matrix is the sum of |eigenvalues|") {
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = 1;
  d(1, 1) = -2;
  d(2, 2) = 0.5;
  CHECK(trace_norm(d) == doctest::Approx(3.5));
}

TEST_CASE("embed follows site 0 = most significant bit") {
  const Mat z0 = embed(pauli('Z'), {0}, 2);
  CHECK(z0(0, 0).real() == 1.0);
  CHECK(z0(1, 1).real() == 1.0);
  CHECK(z0(2, 2).real() == -1.0);
  CHECK(z0(3, 3).real() == -1.0);
  // a two-qubit operator on reversed positions equals the swapped Kronecker product
  const Mat xz = pauli_string("XZ");
  CHECK((embed(xz, {1, 0}, 2) - pauli_string("ZX")).norm() < 1e-14);
}

TEST_CASE("apply_local matches the embedded product") {
  Rng rng = make_rng(3, 0, Stream::kState);
  const Mat A = random_hermitian(4, rng);
  Vec psi = Vec::Random(16);
  const Vec expect = embed(A, {3, 1}, 4) * psi;
  apply_local(A, {3, 1}, 4, psi);
  CHECK((psi - expect).norm() < 1e-12);

  Mat M = Mat::Random(16, 16);
  const Mat expect_m = embed(A, {0, 2}, 4) * M;
  apply_local(A, {0, 2}, 4, M);
  CHECK((M - expect_m).norm() < 1e-12);
}

TEST_CASE("validate_density") {
  CHECK_NOTHROW(validate_density(Mat(0.5 * Mat::Identity(2, 2))));
  CHECK_THROWS_AS(validate_density(Mat(Mat::Identity(2, 2))), DomainError);
  Mat bad = Mat::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(validate_density(bad), DomainError);
}

TEST_CASE("commutator of Paulis") {
  CHECK((commutator(pauli('X'), pauli('Y')) - cplx(0, 2) * pauli('Z')).norm() < 1e-14);
  CHECK(commutator(pauli('Z'), pauli('Z')).norm() == 0.0);
}
