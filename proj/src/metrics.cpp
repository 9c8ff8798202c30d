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

#include "stabsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "stabsim/error.hpp"

namespace stabsim {

double expectation(const Mat& O, const Vec& psi) { return psi.dot(O * psi).real(); }

double expectation(const Mat& O, const Mat& rho) { return (O * rho).trace().real(); }

double delta_state(const Mat& O, const Vec& exact, const Vec& noisy) {
  if (exact.size() != O.rows() || noisy.size() != O.rows()) throw DomainError("delta_state: shape mismatch");
  return std::abs(expectation(O, exact) - expectation(O, noisy));
}

double delta_state(const Mat& O, const Mat& rho_exact, const Mat& rho_noisy) {
  if (rho_exact.rows() != O.rows() || rho_noisy.rows() != O.rows()) throw DomainError("delta_state: shape mismatch");
  return std::abs(expectation(O, rho_exact) - expectation(O, rho_noisy));
}

double delta_state(const Mat& O, const Mat& rho0, const Mat& U_exact, const Mat& rho_noisy) {
  validate_density(rho0);
  return delta_state(O, Mat(U_exact * rho0 * U_exact.adjoint()), rho_noisy);
}

double delta_state(const Observable& O, const TruncatedHamiltonian& trunc, const Vec& exact, const Vec& noisy) {
  return delta_state(embed_observable(O, trunc), exact, noisy);
}

double delta_worst(const Mat& O, const Mat& U, const Mat& V) {
  if (!is_unitary(U) || !is_unitary(V)) throw DomainError("delta_worst: propagators must be unitary to 1e-9");
  Mat D = U.adjoint() * O * U - V.adjoint() * O * V;
  D = (0.5 * (D + D.adjoint())).eval();
  return operator_norm(D);
}

double hs_distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

std::vector<TruncationPoint> truncation_probe(const Observable& O, const LocalHamiltonian& ham, double t,
                                              const std::vector<int>& l_list) {
  if (l_list.empty()) throw DomainError("truncation_probe: empty l list");
  const int l_ref = *std::max_element(l_list.begin(), l_list.end());
  const TruncatedHamiltonian ref(ham, O, l_ref);
  const auto heisenberg = [&](const TruncatedHamiltonian& tr) {
    const EigHermitian e = eig_hermitian(assemble_dense(tr));
    const Mat U = propagator(e, t);
    return Mat(U.adjoint() * embed_observable(O, tr) * U);
  };
  const Mat O_ref = heisenberg(ref);
  const auto c = ref.constants();
  std::vector<TruncationPoint> out;
  for (int l : l_list) {
    TruncationPoint pt;
    pt.l = l;
    pt.rhs = static_cast<double>(O.support.size()) * O.norm *
             std::min(std::exp(-c.mu * l) * std::expm1(c.mu * c.v * t), 1.0);
    if (l != l_ref) {
      const TruncatedHamiltonian tr(ham, O, l);
      const Mat O_l = extend({tr.region(), heisenberg(tr)}, ref.region());
      Mat D = O_l - O_ref;
      D = (0.5 * (D + D.adjoint())).eval();
      pt.error = operator_norm(D);
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace stabsim
