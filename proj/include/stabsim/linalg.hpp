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

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace stabsim {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 12;
inline constexpr std::size_t kMaxDim = std::size_t{1} << kMaxQubits;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-9;

struct EigHermitian {
  Eigen::VectorXd eigenvalues;  // ascending
  Mat eigenvectors;
};

bool is_hermitian(const Mat& A, double tol = kHermitianTol);
bool is_unitary(const Mat& U, double tol = kUnitaryTol);

EigHermitian eig_hermitian(const Mat& H);
// V diag(exp(-i s lambda)) V^dagger.
Mat propagator(const EigHermitian& eig, double s);
Mat expm_i_hermitian(const Mat& H, double s);
// exp(A) for a general square matrix (Pade scaling and squaring).
Mat expm_general(const Mat& A);

double operator_norm(const Mat& A);
// Sum of singular values.
double trace_norm(const Mat& A);
// Full trace norm ||rho - sigma||_1 of two validated density matrices.
double trace_distance(const Mat& rho, const Mat& sigma);
void validate_density(const Mat& rho, double trace_tol = 1e-10, double psd_tol = 1e-10);

Mat commutator(const Mat& A, const Mat& B);

// Local operators act on qubit positions of an n-qubit register. Position k
// is bit (n - 1 - k) of the basis index; the first listed position is the
// most significant factor of the local matrix.
Mat embed(const Mat& local, const std::vector<int>& positions, int n_qubits);
void apply_local(const Mat& local, const std::vector<int>& positions, int n_qubits, Vec& psi);
// Left-multiplies every column of M by the embedded local operator.
void apply_local(const Mat& local, const std::vector<int>& positions, int n_qubits, Mat& M);

Mat pauli(char c);
// Kronecker product of single-qubit Paulis, first character most significant.
Mat pauli_string(const std::string& ops);

}  // namespace stabsim
