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

#include "stabsim/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>

#include "stabsim/error.hpp"

namespace stabsim {

int l1_distance(const Site& a, const Site& b) {
  if (a.size() != b.size()) throw DomainError("l1_distance: dimension mismatch");
  int s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
}

std::string site_to_string(const Site& s) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
  os << ')';
  return os.str();
}

LatticeSpec::LatticeSpec(int d_, std::vector<int> extent_, std::vector<int> origin_)
    : d(d_), extent(std::move(extent_)), origin(std::move(origin_)) {
  if (d < 1) throw DomainError("lattice: d must be >= 1");
  if (static_cast<int>(extent.size()) != d) throw DomainError("lattice: extent must have d entries");
  for (int e : extent)
    if (e < 1) throw DomainError("lattice: every extent must be >= 1");
  if (origin.empty()) origin.assign(d, 0);
  if (static_cast<int>(origin.size()) != d) throw DomainError("lattice: origin must have d entries");
}

LatticeSpec LatticeSpec::chain(int length, int origin) { return LatticeSpec(1, {length}, {origin}); }

bool LatticeSpec::contains(const Site& s) const {
  if (static_cast<int>(s.size()) != d) return false;
  for (int k = 0; k < d; ++k)
    if (s[k] < origin[k] || s[k] >= origin[k] + extent[k]) return false;
  return true;
}

std::size_t LatticeSpec::site_count() const {
  std::size_t n = 1;
  for (int e : extent) n *= static_cast<std::size_t>(e);
  return n;
}

std::vector<Site> LatticeSpec::sites() const {
  std::vector<Site> out;
  out.reserve(site_count());
  Site s = origin;
  while (true) {
    out.push_back(s);
    int k = d - 1;
    while (k >= 0) {
      if (++s[k] < origin[k] + extent[k]) break;
      s[k] = origin[k];
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

int LatticeSpec::diameter() const {
  int s = 0;
  for (int e : extent) s += e - 1;
  return s;
}

Region::Region(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

bool Region::contains(const Site& s) const { return std::binary_search(sites_.begin(), sites_.end(), s); }

int Region::index_of(const Site& s) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || *it != s) return -1;
  return static_cast<int>(it - sites_.begin());
}

bool Region::intersects(const Region& other) const {
  auto a = sites_.begin();
  auto b = other.sites_.begin();
  while (a != sites_.end() && b != other.sites_.end()) {
    if (*a == *b) return true;
    if (*a < *b)
      ++a;
    else
      ++b;
  }
  return false;
}

bool Region::subset_of(const Region& other) const {
  return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(), sites_.end());
}

Region Region::united(const Region& other) const {
  std::vector<Site> all = sites_;
  all.insert(all.end(), other.sites_.begin(), other.sites_.end());
  return Region(std::move(all));
}

int Region::distance_to(const Site& s) const {
  if (sites_.empty()) throw DomainError("distance_to: empty region");
  int best = std::numeric_limits<int>::max();
  for (const auto& x : sites_) best = std::min(best, l1_distance(x, s));
  return best;
}

Region ball(const Site& center, int radius, const LatticeSpec& lattice) {
  if (!lattice.contains(center)) throw DomainError("ball: center " + site_to_string(center) + " outside lattice");
  if (radius < 0) throw DomainError("ball: radius must be >= 0");
  const int d = lattice.d;
  std::vector<Site> out;
  Site s(d);
  for (int k = 0; k < d; ++k) s[k] = center[k] - radius;
  while (true) {
    if (lattice.contains(s) && l1_distance(s, center) <= radius) out.push_back(s);
    int k = d - 1;
    while (k >= 0) {
      if (++s[k] <= center[k] + radius) break;
      s[k] = center[k] - radius;
      --k;
    }
    if (k < 0) break;
  }
  return Region(std::move(out));
}

Region omega_region(const Region& support, int l, const LatticeSpec& lattice) {
  if (support.empty()) throw DomainError("omega_region: empty support");
  if (l < 0) throw DomainError("omega_region: l must be >= 0");
  std::vector<Site> out;
  for (const auto& x : support.sites()) {
    const Region b = ball(x, l, lattice);
    out.insert(out.end(), b.sites().begin(), b.sites().end());
  }
  return Region(std::move(out));
}

double lambda_d(int d) { return std::pow(2.0, d) / std::tgamma(d + 1.0); }

LocalityConstants LocalityConstants::make(int d, int R, int R_O) {
  if (d < 1) throw DomainError("locality constants: d must be >= 1");
  if (R < 1) throw DomainError("locality constants: R must be >= 1");
  if (R_O < 0) throw DomainError("locality constants: R_O must be >= 0");
  LocalityConstants c;
  c.d = d;
  c.R = R;
  c.R_O = R_O;
  c.Lambda_d = lambda_d(d);
  c.v = std::numbers::e * c.Lambda_d * std::pow(static_cast<double>(R), d + 1);
  c.mu = 1.0 / R;
  return c;
}

ThetaCountBound theta_count_bound(int l, const LocalityConstants& c) {
  if (l < 0) throw DomainError("theta_count_bound: l must be >= 0");
  ThetaCountBound b;
  b.count_bound = c.Lambda_d * std::pow(static_cast<double>(c.R_O + l + c.R), c.d);
  b.support_bound = c.Lambda_d * std::pow(static_cast<double>(2 * c.R + l + c.R_O), c.d);
  if (l >= 2 * c.R + c.R_O) {
    const double s = std::pow(2.0, c.d) * c.Lambda_d * std::pow(static_cast<double>(l), c.d);
    b.simplified_count = s;
    b.simplified_support = s;
  }
  return b;
}

}  // namespace stabsim
