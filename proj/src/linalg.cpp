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

#include "stabsim/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "stabsim/error.hpp"

namespace stabsim {

namespace {

std::vector<std::size_t> local_offsets(const std::vector<int>& positions, int n_qubits, std::size_t& mask) {
  const int k = static_cast<int>(positions.size());
  std::vector<std::size_t> bit(k);
  mask = 0;
  for (int i = 0; i < k; ++i) {
    if (positions[i] < 0 || positions[i] >= n_qubits) throw DomainError("local operator position out of range");
    bit[i] = std::size_t{1} << (n_qubits - 1 - positions[i]);
    if (mask & bit[i]) throw DomainError("local operator positions repeat");
    mask |= bit[i];
  }
  std::vector<std::size_t> off(std::size_t{1} << k, 0);
  for (std::size_t m = 0; m < off.size(); ++m)
    for (int i = 0; i < k; ++i)
      if (m & (std::size_t{1} << (k - 1 - i))) off[m] |= bit[i];
  return off;
}

void check_local(const Mat& local, const std::vector<int>& positions) {
  const Eigen::Index dl = Eigen::Index{1} << positions.size();
  if (local.rows() != dl || local.cols() != dl) throw DomainError("local operator dimension does not match positions");
}

}  // namespace

bool is_hermitian(const Mat& A, double tol) {
  if (A.rows() != A.cols()) return false;
  return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, A.cwiseAbs().maxCoeff());
}

bool is_unitary(const Mat& U, double tol) {
  if (U.rows() != U.cols()) return false;
  return (U.adjoint() * U - Mat::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() <= tol;
}

EigHermitian eig_hermitian(const Mat& H) {
  if (!is_hermitian(H)) throw DomainError("eig_hermitian: input is not Hermitian");
  if (static_cast<std::size_t>(H.rows()) > kMaxDim) throw CapacityError("eig_hermitian: dimension exceeds 4096");
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Mat propagator(const EigHermitian& eig, double s) {
  const Eigen::Index n = eig.eigenvalues.size();
  Vec phase(n);
  for (Eigen::Index i = 0; i < n; ++i) phase[i] = std::polar(1.0, -s * eig.eigenvalues[i]);
  return eig.eigenvectors * phase.asDiagonal() * eig.eigenvectors.adjoint();
}

Mat expm_i_hermitian(const Mat& H, double s) { return propagator(eig_hermitian(H), s); }

Mat expm_general(const Mat& A) {
  if (A.rows() != A.cols()) throw DomainError("expm_general: matrix not square");
  return A.exp();
}

double operator_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  if (A.rows() == A.cols() && is_hermitian(A, 1e-13)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // i[A,B]-type inputs are anti-Hermitian; their norm is that of iA.
  if (A.rows() == A.cols() && is_hermitian(cplx(0, 1) * A, 1e-13)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(cplx(0, 1) * A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Mat> svd(A);
  return svd.singularValues()(0);
}

double trace_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  if (A.rows() == A.cols() && is_hermitian(A, 1e-13)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<Mat> svd(A);
  return svd.singularValues().sum();
}

void validate_density(const Mat& rho, double trace_tol, double psd_tol) {
  if (!is_hermitian(rho, 1e-10)) throw DomainError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > trace_tol) throw DomainError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol) throw DomainError("density matrix is not positive semidefinite");
}

double trace_distance(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw DomainError("trace_distance: shape mismatch");
  validate_density(rho);
  validate_density(sigma);
  Mat diff = rho - sigma;
  diff = (0.5 * (diff + diff.adjoint())).eval();
  return trace_norm(diff);
}

Mat commutator(const Mat& A, const Mat& B) { return A * B - B * A; }

Mat embed(const Mat& local, const std::vector<int>& positions, int n_qubits) {
  check_local(local, positions);
  if (n_qubits > kMaxQubits) throw CapacityError("embed: more than 12 qubits");
  std::size_t mask = 0;
  const auto off = local_offsets(positions, n_qubits, mask);
  const std::size_t dim = std::size_t{1} << n_qubits;
  Mat out = Mat::Zero(dim, dim);
  const std::size_t dl = off.size();
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t r = 0; r < dl; ++r)
      for (std::size_t c = 0; c < dl; ++c) out(base | off[r], base | off[c]) = local(r, c);
  }
  return out;
}

void apply_local(const Mat& local, const std::vector<int>& positions, int n_qubits, Vec& psi) {
  check_local(local, positions);
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (static_cast<std::size_t>(psi.size()) != dim) throw DomainError("apply_local: state dimension mismatch");
  std::size_t mask = 0;
  const auto off = local_offsets(positions, n_qubits, mask);
  const std::size_t dl = off.size();
  Vec in(dl), out(dl);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t m = 0; m < dl; ++m) in[m] = psi[base | off[m]];
    out.noalias() = local * in;
    for (std::size_t m = 0; m < dl; ++m) psi[base | off[m]] = out[m];
  }
}

void apply_local(const Mat& local, const std::vector<int>& positions, int n_qubits, Mat& M) {
  check_local(local, positions);
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (static_cast<std::size_t>(M.rows()) != dim) throw DomainError("apply_local: matrix dimension mismatch");
  std::size_t mask = 0;
  const auto off = local_offsets(positions, n_qubits, mask);
  const std::size_t dl = off.size();
  Mat in(dl, M.cols());
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t m = 0; m < dl; ++m) in.row(m) = M.row(base | off[m]);
    const Mat out = local * in;
    for (std::size_t m = 0; m < dl; ++m) M.row(base | off[m]) = out.row(m);
  }
}

Mat pauli(char c) {
  Mat P(2, 2);
  switch (c) {
    case 'I': P << 1, 0, 0, 1; break;
    case 'X': P << 0, 1, 1, 0; break;
    case 'Y': P << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': P << 1, 0, 0, -1; break;
    default: throw DomainError(std::string("unknown Pauli '") + c + "'");
  }
  return P;
}

Mat pauli_string(const std::string& ops) {
  Mat out = Mat::Identity(1, 1);
  for (char c : ops) out = Eigen::kroneckerProduct(out, pauli(c)).eval();
  return out;
}

}  // namespace stabsim
