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

struct ErrorSample {
  double delta_rho = 0.0;
  std::optional<double> delta_wc;
  std::optional<double> hs_distance;  // ||psi - psi'||_2
};

double expectation(const Mat& O, const Vec& psi);
double expectation(const Mat& O, const Mat& rho);

// |tr(O rho_exact) - tr(O rho_noisy)| with O already embedded.
double delta_state(const Mat& O, const Vec& exact, const Vec& noisy);
double delta_state(const Mat& O, const Mat& rho_exact, const Mat& rho_noisy);
// Same, propagating rho0 with the exact unitary first.
double delta_state(const Mat& O, const Mat& rho0, const Mat& U_exact, const Mat& rho_noisy);
// Embeds O into the truncated register first.
double delta_state(const Observable& O, const TruncatedHamiltonian& trunc, const Vec& exact, const Vec& noisy);

// ||U^dag O U - V^dag O V||.
double delta_worst(const Mat& O, const Mat& U, const Mat& V);

double hs_distance(const Vec& a, const Vec& b);

struct TruncationPoint {
  int l = 0;
  double error = 0.0;
  double rhs = 0.0;  // |supp O| ||O|| min(e^{-mu l}(e^{mu v t} - 1), 1)
};

// Heisenberg-picture truncation error against the largest l in l_list.
std::vector<TruncationPoint> truncation_probe(const Observable& O, const LocalHamiltonian& ham, double t,
                                              const std::vector<int>& l_list);

}  // namespace stabsim
