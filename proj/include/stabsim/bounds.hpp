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

#include <map>
#include <optional>
#include <string>

namespace stabsim {

enum class TheoremId { T1, T2, T3, T4, T5, T5b, T6, T7, T8, T9, Trotter, Truncation, RandomSum };

std::string to_string(TheoremId id);
TheoremId parse_theorem(const std::string& name);
// Worst-case statements hold per realization; the others hold in expectation.
bool is_worst_case(TheoremId id);

struct BoundParams {
  int d = 1;
  int R = 1;
  int R_O = 0;
  double norm_O = 1.0;
  int supp_O_size = 1;
  std::optional<int> p;
  std::optional<int> n;
  std::optional<int> l;  // absent: no truncation term
  std::optional<int> m;
  std::optional<double> t;
  std::optional<double> delta;
  std::optional<double> lambda;       // +inf allowed
  std::optional<double> theta_count;  // |Theta_l|; default theta_count_bound(l)
  std::optional<double> jump_norm;    // ||sum_a L_a^2||
  std::optional<double> C;            // default 2^d Lambda_d
  std::optional<double> T;            // random-sum length; default n Upsilon |Theta_l|
  std::optional<int> l_max;           // capacity cap for optimal_params
};

struct DerivedConstants {
  double Lambda_d = 0.0;
  double v = 0.0;
  double mu = 0.0;
  double K_d = 0.0;  // Gamma(d) / mu^d
  double K = 0.0;    // needs p
  int Upsilon = 0;   // needs p
  double M = 0.0;
};

DerivedConstants derive_constants(const BoundParams& params);

// P[Delta >= offset + scale * s] <= min(1, 2 exp(-s^2)).
struct TailBound {
  double scale = 0.0;
  double offset = 0.0;
  double probability(double s) const;
  double threshold(double s) const { return offset + scale * s; }
};

struct BoundReport {
  TheoremId theorem = TheoremId::T1;
  double rhs = 0.0;
  std::map<std::string, double> terms;
  std::optional<double> asymptotic;
  std::optional<int> n_opt;
  std::optional<int> l_opt;
  std::optional<TailBound> tail;
  std::map<std::string, bool> assumptions;

  bool assumptions_ok() const;
};

BoundReport eval_bound(TheoremId id, const BoundParams& params);

struct OptimalParams {
  std::optional<int> n_opt;
  int l_opt = 0;
  double l_raw = 0.0;
  bool l_feasible = true;
};

OptimalParams optimal_params(TheoremId id, const BoundParams& params);

}  // namespace stabsim
