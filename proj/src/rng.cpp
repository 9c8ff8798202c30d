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

#include "stabsim/rng.hpp"

namespace stabsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index, Stream stream) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ trial_index);
  return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

Rng make_rng(std::uint64_t master_seed, std::uint64_t trial_index, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(derive_seed(master_seed, trial_index, stream)),
                    static_cast<std::uint32_t>(derive_seed(master_seed, trial_index, stream) >> 32)};
  return Rng(seq);
}

}  // namespace stabsim
