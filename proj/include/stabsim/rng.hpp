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
#include <random>

namespace stabsim {

using Rng = std::mt19937_64;

// Purpose tags keep the streams of one trial disjoint.
enum class Stream : std::uint64_t {
  kGates = 1,
  kPaths = 2,
  kWiener = 3,
  kDirections = 4,
  kState = 5,
  kStatic = 6,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index, Stream stream);
Rng make_rng(std::uint64_t master_seed, std::uint64_t trial_index, Stream stream);

}  // namespace stabsim
