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

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stabsim/bounds.hpp"
#include "stabsim/lattice.hpp"
#include "stabsim/operators.hpp"

namespace stabsim {

using Json = nlohmann::json;

struct PauliTermConfig {
  std::string ops;
  std::vector<Site> sites;
  double weight = 1.0;
  bool operator==(const PauliTermConfig&) const = default;
};

struct CustomTermConfig {
  Site anchor;
  std::vector<PauliTermConfig> paulis;
  bool operator==(const CustomTermConfig&) const = default;
};

struct ModelConfig {
  std::string model = "tfim";  // tfim | heisenberg | custom
  int d = 1;
  std::vector<int> extent{6};
  std::vector<int> origin;  // empty: zeros
  double J = 1.0;
  double h = 1.0;
  std::vector<CustomTermConfig> terms;
  bool operator==(const ModelConfig&) const = default;
};

struct ObservableConfig {
  std::string paulis = "Z";
  std::vector<Site> sites{{0}};
  bool operator==(const ObservableConfig&) const = default;
};

struct NoiseConfig {
  // none | M1 | M2 | discrete_ito | analog_static | analog_gaussian | white_noise | lindblad
  std::string model = "none";
  int m = 1;
  std::string ensemble = "gue_normalized";
  std::optional<double> dt;  // white-noise step / Gaussian grid spacing
  std::optional<int> n_grid;
  double tol = 1e-8;  // analog integrator tolerance
  int trajectories = 200;  // Lindblad paths per trial above 64 dimensions
  bool operator==(const NoiseConfig&) const = default;
};

struct GridConfig {
  std::vector<double> t{1.0};
  std::vector<double> delta{0.0};
  std::vector<int> n{1};
  std::vector<int> l{2};
  std::vector<int> p{2};
  std::vector<double> lambda{std::numeric_limits<double>::infinity()};
  bool operator==(const GridConfig&) const = default;
};

struct ExperimentConfig {
  ModelConfig model;
  ObservableConfig observable;
  std::string initial_state = "zero";
  NoiseConfig noise;
  GridConfig grid;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::vector<std::string> theorems;
  bool worst_case = false;
  bool timing = false;
  bool include_truncation = false;
  bool operator==(const ExperimentConfig&) const = default;
};

struct GridPoint {
  int index = 0;
  double t = 1.0;
  double delta = 0.0;
  int n = 1;
  int l = 2;
  int p = 2;
  double lambda = std::numeric_limits<double>::infinity();
};

// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);
std::string canonical_string(const ExperimentConfig& c);

// "a.b.c=value"; the path must exist in the canonical form.
void apply_override(ExperimentConfig& c, const std::string& assignment);

void validate(const ExperimentConfig& c);
std::vector<GridPoint> grid_points(const ExperimentConfig& c);

LatticeSpec make_lattice(const ModelConfig& m);
LocalHamiltonian make_hamiltonian(const ModelConfig& m);
Observable make_observable(const ObservableConfig& o);

Json to_json(const BoundReport& r);
// Doubles with 17 significant digits.
std::string format_double(double x);

}  // namespace stabsim
