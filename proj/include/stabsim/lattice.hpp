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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace stabsim {

using Site = std::vector<int>;

int l1_distance(const Site& a, const Site& b);
std::string site_to_string(const Site& s);

// Open-boundary hypercubic box. Coordinates on axis k run over
// origin[k], ..., origin[k] + extent[k] - 1.
struct LatticeSpec {
  int d = 1;
  std::vector<int> extent;
  std::vector<int> origin;

  LatticeSpec() = default;
  LatticeSpec(int d, std::vector<int> extent, std::vector<int> origin = {});

  static LatticeSpec chain(int length, int origin = 0);

  bool contains(const Site& s) const;
  std::size_t site_count() const;
  // All sites in lexicographic order.
  std::vector<Site> sites() const;
  int diameter() const;
};

// Sorted, duplicate-free set of sites. The order fixes the tensor-factor
// order: position k in sites() is qubit k.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Site> sites);

  const std::vector<Site>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const Site& operator[](std::size_t i) const { return sites_[i]; }

  bool contains(const Site& s) const;
  // Position of s, or -1.
  int index_of(const Site& s) const;
  bool intersects(const Region& other) const;
  bool subset_of(const Region& other) const;
  Region united(const Region& other) const;
  // l1 distance from s to the nearest site of the region.
  int distance_to(const Site& s) const;

  bool operator==(const Region& other) const { return sites_ == other.sites_; }

 private:
  std::vector<Site> sites_;
};

Region ball(const Site& center, int radius, const LatticeSpec& lattice);
Region omega_region(const Region& support, int l, const LatticeSpec& lattice);

double lambda_d(int d);

struct LocalityConstants {
  int d = 1;
  int R = 1;
  int R_O = 0;
  double Lambda_d = 2.0;
  double v = 0.0;
  double mu = 0.0;

  static LocalityConstants make(int d, int R, int R_O);
};

struct ThetaCountBound {
  double count_bound = 0.0;
  double support_bound = 0.0;
  std::optional<double> simplified_count;
  std::optional<double> simplified_support;
};

ThetaCountBound theta_count_bound(int l, const LocalityConstants& c);

}  // namespace stabsim
