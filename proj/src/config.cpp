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

#include "stabsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stabsim/error.hpp"
#include "stabsim/noise.hpp"

namespace stabsim {

namespace {

const std::set<std::string> kNoiseModels = {"none",           "M1",          "M2",      "discrete_ito", "analog_static",
                                            "analog_gaussian", "white_noise", "lindblad"};
const std::set<std::string> kStates = {"zero", "plus", "y", "neel"};

// Reads keys of one JSON object and rejects whatever is left over.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    const auto it = j_.find(key);
    seen_.insert(key);
    if (it == j_.end()) return;
    get(*it, out, path_ + "." + key);
  }

  const Json* raw(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(path_ + "." + it.key(), "unknown key");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config " + path + ": " + msg);
  }

  static void get(const Json& j, double& out, const std::string& path) {
    if (j.is_number()) {
      out = j.get<double>();
    } else if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity")) {
      out = std::numeric_limits<double>::infinity();
    } else if (j.is_null()) {
      out = std::numeric_limits<double>::infinity();
    } else {
      fail(path, "expected a number");
    }
  }
  static void get(const Json& j, int& out, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    out = j.get<int>();
  }
  static void get(const Json& j, std::uint64_t& out, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
      fail(path, "expected a non-negative integer");
    out = j.get<std::uint64_t>();
  }
  static void get(const Json& j, bool& out, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    out = j.get<bool>();
  }
  static void get(const Json& j, std::string& out, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    out = j.get<std::string>();
  }
  template <class T>
  static void get(const Json& j, std::optional<T>& out, const std::string& path) {
    if (j.is_null()) {
      out.reset();
      return;
    }
    T v{};
    get(j, v, path);
    out = v;
  }
  template <class T>
  static void get(const Json& j, std::vector<T>& out, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
      T v{};
      get(j[i], v, path + "[" + std::to_string(i) + "]");
      out.push_back(std::move(v));
    }
  }
  static void get(const Json& j, PauliTermConfig& out, const std::string& path) {
    ObjectReader r(j, path);
    r.read("ops", out.ops);
    r.read("sites", out.sites);
    r.read("weight", out.weight);
    r.finish();
  }
  static void get(const Json& j, CustomTermConfig& out, const std::string& path) {
    ObjectReader r(j, path);
    r.read("anchor", out.anchor);
    r.read("paulis", out.paulis);
    r.finish();
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Accepts [[0],[1]] and the d=1 shorthand [0, 1].
std::vector<Site> read_sites(const Json& j, const std::string& path) {
  if (!j.is_array()) ObjectReader::fail(path, "expected an array of sites");
  std::vector<Site> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Site s;
    if (j[i].is_number_integer()) {
      s = {j[i].get<int>()};
    } else {
      ObjectReader::get(j[i], s, path + "[" + std::to_string(i) + "]");
    }
    out.push_back(s);
  }
  return out;
}

Json lambda_json(double x) { return std::isfinite(x) ? Json(x) : Json("inf"); }

template <class T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  ObjectReader top(j, "$");
  if (const Json* m = top.raw("model")) {
    ObjectReader r(*m, "$.model");
    r.read("model", c.model.model);
    r.read("d", c.model.d);
    r.read("extent", c.model.extent);
    r.read("origin", c.model.origin);
    if (const Json* cp = r.raw("couplings")) {
      ObjectReader rc(*cp, "$.model.couplings");
      rc.read("J", c.model.J);
      rc.read("h", c.model.h);
      rc.finish();
    }
    r.read("terms", c.model.terms);
    r.finish();
  }
  if (const Json* o = top.raw("observable")) {
    ObjectReader r(*o, "$.observable");
    r.read("paulis", c.observable.paulis);
    if (const Json* s = r.raw("sites")) c.observable.sites = read_sites(*s, "$.observable.sites");
    r.finish();
  }
  top.read("initial_state", c.initial_state);
  if (const Json* nz = top.raw("noise")) {
    ObjectReader r(*nz, "$.noise");
    r.read("model", c.noise.model);
    r.read("m", c.noise.m);
    r.read("ensemble", c.noise.ensemble);
    r.read("dt", c.noise.dt);
    r.read("n_grid", c.noise.n_grid);
    r.read("tol", c.noise.tol);
    r.read("trajectories", c.noise.trajectories);
    r.finish();
  }
  if (const Json* g = top.raw("grid")) {
    ObjectReader r(*g, "$.grid");
    r.read("t", c.grid.t);
    r.read("delta", c.grid.delta);
    r.read("n", c.grid.n);
    r.read("l", c.grid.l);
    r.read("p", c.grid.p);
    r.read("lambda", c.grid.lambda);
    r.finish();
  }
  top.read("trials", c.trials);
  top.read("master_seed", c.master_seed);
  top.read("theorems", c.theorems);
  top.read("worst_case", c.worst_case);
  top.read("timing", c.timing);
  top.read("include_truncation", c.include_truncation);
  top.finish();
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  Json terms = Json::array();
  for (const auto& t : c.model.terms) {
    Json pl = Json::array();
    for (const auto& p : t.paulis) pl.push_back({{"ops", p.ops}, {"sites", p.sites}, {"weight", p.weight}});
    terms.push_back({{"anchor", t.anchor}, {"paulis", pl}});
  }
  j["model"] = {{"model", c.model.model},
                {"d", c.model.d},
                {"extent", c.model.extent},
                {"origin", c.model.origin},
                {"couplings", {{"J", c.model.J}, {"h", c.model.h}}},
                {"terms", terms}};
  j["observable"] = {{"paulis", c.observable.paulis}, {"sites", c.observable.sites}};
  j["initial_state"] = c.initial_state;
  j["noise"] = {{"model", c.noise.model},       {"m", c.noise.m},
                {"ensemble", c.noise.ensemble}, {"dt", opt_json(c.noise.dt)},
                {"n_grid", opt_json(c.noise.n_grid)}, {"tol", c.noise.tol},
                {"trajectories", c.noise.trajectories}};
  Json lambdas = Json::array();
  for (double x : c.grid.lambda) lambdas.push_back(lambda_json(x));
  j["grid"] = {{"t", c.grid.t}, {"delta", c.grid.delta}, {"n", c.grid.n},
               {"l", c.grid.l}, {"p", c.grid.p},         {"lambda", lambdas}};
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["theorems"] = c.theorems;
  j["worst_case"] = c.worst_case;
  j["timing"] = c.timing;
  j["include_truncation"] = c.include_truncation;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string canonical_string(const ExperimentConfig& c) { return config_to_json(c).dump(2); }

void apply_override(ExperimentConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must be key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json j = config_to_json(c);
  Json* node = &j;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError("override: unknown key '" + key + "'");
    node = &(*node)[part];
  }
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  if (node->is_array() && !value.is_array()) value = Json::array({value});
  const bool numeric_pair = node->is_number() && value.is_number();
  const bool nullable = node->is_null() || value.is_null();
  const bool lambda_like = node->is_string() && value.is_number();  // "inf" slot set to a number
  if (node->type() != value.type() && !numeric_pair && !nullable && !lambda_like && !node->is_array())
    throw ConfigError("override: type mismatch for '" + key + "'");
  *node = value;
  c = config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  const auto bad = [](const std::string& m) { throw ConfigError("config: " + m); };
  const GridConfig& g = c.grid;
  if (g.t.empty() || g.delta.empty() || g.n.empty() || g.l.empty() || g.p.empty() || g.lambda.empty())
    bad("every grid axis needs at least one value");
  if (c.trials < 1) bad("trials must be >= 1");
  for (double t : g.t)
    if (!(t >= 0.0) || !std::isfinite(t)) bad("grid.t values must be finite and >= 0");
  for (double d : g.delta)
    if (!(d >= 0.0) || !std::isfinite(d)) bad("grid.delta values must be finite and >= 0");
  for (int n : g.n)
    if (n < 1) bad("grid.n values must be >= 1");
  for (int l : g.l)
    if (l < 0) bad("grid.l values must be >= 0");
  for (int p : g.p)
    if (p < 2 || p % 2) bad("grid.p values must be positive and even");
  for (double x : g.lambda)
    if (!(x > 0.0)) bad("grid.lambda values must be > 0");
  if (!kNoiseModels.count(c.noise.model)) bad("unknown noise model '" + c.noise.model + "'");
  if (c.noise.m < 1) bad("noise.m must be >= 1");
  if (c.noise.dt && !(*c.noise.dt > 0.0)) bad("noise.dt must be > 0");
  if (c.noise.n_grid && *c.noise.n_grid < 2) bad("noise.n_grid must be >= 2");
  if (c.noise.trajectories < 1) bad("noise.trajectories must be >= 1");
  if (!(c.noise.tol > 0.0)) bad("noise.tol must be > 0");
  parse_ensemble(c.noise.ensemble);
  if (!kStates.count(c.initial_state)) bad("unknown initial_state '" + c.initial_state + "'");
  for (const auto& t : c.theorems) parse_theorem(t);
  if (c.model.d < 1) bad("model.d must be >= 1");
  if (static_cast<int>(c.model.extent.size()) != c.model.d) bad("model.extent must have d entries");
  if (!c.model.origin.empty() && static_cast<int>(c.model.origin.size()) != c.model.d)
    bad("model.origin must have d entries");
  if (c.model.model != "tfim" && c.model.model != "heisenberg" && c.model.model != "custom")
    bad("unknown model '" + c.model.model + "'");

  const LocalHamiltonian ham = make_hamiltonian(c.model);
  const Observable obs = make_observable(c.observable);
  for (const auto& s : obs.support.sites())
    if (!ham.lattice().contains(s)) bad("observable site " + site_to_string(s) + " lies outside the lattice");
  for (int l : g.l) truncate(ham, obs, l);  // CapacityError propagates
}

std::vector<GridPoint> grid_points(const ExperimentConfig& c) {
  std::vector<GridPoint> pts;
  for (int p : c.grid.p)
    for (int n : c.grid.n)
      for (int l : c.grid.l)
        for (double lambda : c.grid.lambda)
          for (double delta : c.grid.delta)
            for (double t : c.grid.t) {
              GridPoint g;
              g.index = static_cast<int>(pts.size());
              g.t = t;
              g.delta = delta;
              g.n = n;
              g.l = l;
              g.p = p;
              g.lambda = lambda;
              pts.push_back(g);
            }
  return pts;
}

LatticeSpec make_lattice(const ModelConfig& m) {
  LatticeSpec lat;
  lat.d = m.d;
  lat.extent = m.extent;
  lat.origin = m.origin.empty() ? std::vector<int>(m.d, 0) : m.origin;
  return lat;
}

LocalHamiltonian make_hamiltonian(const ModelConfig& m) {
  const LatticeSpec lat = make_lattice(m);
  if (m.model == "tfim") return transverse_field_ising(lat, m.J, m.h);
  if (m.model == "heisenberg") return heisenberg(lat, m.J, m.h);
  if (m.model == "custom") {
    std::vector<CustomTerm> terms;
    for (const auto& t : m.terms) {
      CustomTerm ct{t.anchor, {}};
      for (const auto& p : t.paulis) ct.paulis.push_back({p.ops, p.sites, p.weight});
      terms.push_back(std::move(ct));
    }
    return custom_hamiltonian(lat, terms);
  }
  throw ConfigError("unknown model '" + m.model + "'");
}

Observable make_observable(const ObservableConfig& o) { return Observable::pauli(o.paulis, o.sites); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const BoundReport& r) {
  Json j;
  j["theorem"] = to_string(r.theorem);
  j["rhs"] = r.rhs;
  j["terms"] = r.terms;
  j["asymptotic"] = opt_json(r.asymptotic);
  j["n_opt"] = opt_json(r.n_opt);
  j["l_opt"] = opt_json(r.l_opt);
  if (r.tail) {
    j["tail"] = {{"scale", r.tail->scale}, {"offset", r.tail->offset}};
  } else {
    j["tail"] = nullptr;
  }
  j["assumptions"] = r.assumptions;
  j["flags"] = Json::array();
  for (const auto& [k, ok] : r.assumptions)
    if (!ok) j["flags"].push_back(k);
  return j;
}

}  // namespace stabsim
