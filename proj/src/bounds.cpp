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

#include "stabsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stabsim/error.hpp"
#include "stabsim/lattice.hpp"

namespace stabsim {

namespace {

constexpr double kPi = std::numbers::pi;

template <class T>
T need(const std::optional<T>& v, const char* name, TheoremId id) {
  if (!v) throw DomainError("eval_bound(" + to_string(id) + "): missing parameter " + name);
  return *v;
}

int upsilon(int p) {
  if (p <= 0 || p % 2 != 0) throw DomainError("bounds: p must be a positive even integer");
  int u = 2;
  for (int k = 1; 2 * k < p; ++k) u *= 5;
  return u;
}

double theta(const BoundParams& bp, TheoremId id) {
  if (bp.theta_count) return *bp.theta_count;
  const int l = need(bp.l, "l (or theta_count)", id);
  return theta_count_bound(l, LocalityConstants::make(bp.d, bp.R, bp.R_O)).count_bound;
}

double truncation_term(const BoundParams& bp, const DerivedConstants& c, double t) {
  const int l = *bp.l;
  return bp.supp_O_size * bp.norm_O * std::min(std::exp(-c.mu * l) * std::expm1(c.mu * c.v * t), 1.0);
}

void add_truncation(BoundReport& r, const BoundParams& bp, const DerivedConstants& c, double t) {
  if (!bp.l) return;
  r.terms["truncation"] = truncation_term(bp, c, t);
  r.terms["truncation_envelope"] = bp.supp_O_size * bp.norm_O * std::exp(-c.mu * (*bp.l - c.v * t));
  r.rhs += r.terms["truncation"];
}

// delta^a t^{d+1} style balanced form with light-cone factor (1 - log(phi)/(mu v t))^d.
double cone(double phi, const DerivedConstants& c, double t, int d) {
  return std::pow(1.0 - std::log(phi) / (c.mu * c.v * t), d);
}

void check_delta(double delta, TheoremId id) {
  if (delta < 0.0) throw DomainError("eval_bound(" + to_string(id) + "): delta must be >= 0");
}

}  // namespace

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T1: return "T1";
    case TheoremId::T2: return "T2";
    case TheoremId::T3: return "T3";
    case TheoremId::T4: return "T4";
    case TheoremId::T5: return "T5";
    case TheoremId::T5b: return "T5b";
    case TheoremId::T6: return "T6";
    case TheoremId::T7: return "T7";
    case TheoremId::T8: return "T8";
    case TheoremId::T9: return "T9";
    case TheoremId::Trotter: return "trotter";
    case TheoremId::Truncation: return "truncation";
    case TheoremId::RandomSum: return "random_sum";
  }
  return "?";
}

TheoremId parse_theorem(const std::string& name) {
  for (TheoremId id : {TheoremId::T1, TheoremId::T2, TheoremId::T3, TheoremId::T4, TheoremId::T5, TheoremId::T5b,
                       TheoremId::T6, TheoremId::T7, TheoremId::T8, TheoremId::T9, TheoremId::Trotter,
                       TheoremId::Truncation, TheoremId::RandomSum})
    if (to_string(id) == name) return id;
  throw ConfigError("unknown theorem id '" + name + "'");
}

bool is_worst_case(TheoremId id) {
  return id == TheoremId::T1 || id == TheoremId::T2 || id == TheoremId::T3 || id == TheoremId::Trotter ||
         id == TheoremId::Truncation;
}

DerivedConstants derive_constants(const BoundParams& bp) {
  const LocalityConstants lc = LocalityConstants::make(bp.d, bp.R, bp.R_O);
  DerivedConstants c;
  c.Lambda_d = lc.Lambda_d;
  c.v = lc.v;
  c.mu = lc.mu;
  c.K_d = std::tgamma(static_cast<double>(bp.d)) / std::pow(c.mu, bp.d);
  c.M = bp.norm_O * bp.supp_O_size * std::pow(c.v, bp.d) * (std::pow(2.0, bp.d) * c.Lambda_d + c.K_d);
  if (bp.p) {
    const int p = *bp.p;
    c.Upsilon = upsilon(p);
    const double ball = c.Lambda_d * std::pow(2.0, bp.d) * std::pow(static_cast<double>(bp.R), bp.d);
    c.K = std::pow(2.0, p) * std::pow(ball, p) * std::pow(std::tgamma(static_cast<double>(p)), bp.d) /
          std::tgamma(p + 2.0);
  }
  return c;
}

double TailBound::probability(double s) const { return std::min(1.0, 2.0 * std::exp(-s * s)); }

bool BoundReport::assumptions_ok() const {
  return std::all_of(assumptions.begin(), assumptions.end(), [](const auto& kv) { return kv.second; });
}

BoundReport eval_bound(TheoremId id, const BoundParams& bp) {
  const DerivedConstants c = derive_constants(bp);
  BoundReport r;
  r.theorem = id;
  const double nO = bp.norm_O;
  const int d = bp.d;

  switch (id) {
    case TheoremId::T1: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      r.terms["M"] = c.M;
      r.rhs = c.M * delta * std::pow(t, d + 1);
      r.asymptotic = r.rhs;
      r.assumptions["vt>1"] = c.v * t > 1.0;
      if (bp.l) {
        const OptimalParams op = optimal_params(id, bp);
        r.l_opt = op.l_opt;
      }
      break;
    }
    case TheoremId::T2:
    case TheoremId::T3: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      const int p = need(bp.p, "p", id);
      const int n = need(bp.n, "n", id);
      const double th = theta(bp, id);
      const double gate = id == TheoremId::T2 ? 2.0 * nO * c.Upsilon * th * delta * t
                                              : 2.0 * nO * n * c.Upsilon * th * delta;
      const double trot = 2.0 * nO * c.K * th * std::pow(t, p + 1) / std::pow(n, p);
      r.terms["gate"] = gate;
      r.terms["trotter"] = trot;
      r.rhs = gate + trot;
      add_truncation(r, bp, c, t);
      if (delta > 0.0 && delta < 1.0) {
        const double phi = id == TheoremId::T2 ? delta * std::pow(t, d + 1)
                                               : std::pow(delta, p / (p + 1.0)) * std::pow(t, d + 1);
        const double f = cone(phi, c, t, d);
        const double base = std::pow(2.0, d + 1) * c.Lambda_d * std::pow(c.v, d) * f;
        r.asymptotic = phi * nO * (base * c.Upsilon + base * c.K + bp.supp_O_size);
        const OptimalParams op = optimal_params(id, bp);
        r.n_opt = op.n_opt;
        r.l_opt = op.l_opt;
        r.assumptions["n>=n_opt"] = n >= *op.n_opt;
        if (bp.l) r.assumptions["l>=l_opt"] = *bp.l >= op.l_opt;
        r.assumptions["phi<1"] = phi < 1.0;
      }
      break;
    }
    case TheoremId::T4: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      const double lambda = need(bp.lambda, "lambda", id);
      const int m = need(bp.m, "m", id);
      const double th = theta(bp, id);
      const double integral = std::isfinite(lambda) ? std::sqrt(2.0 * kPi) * lambda * t : t * t;
      const double x = delta * delta * m * th * integral / 2.0;
      r.terms["double_integral"] = integral;
      r.terms["stochastic"] = 2.0 * nO * std::sqrt(x);
      r.rhs = r.terms["stochastic"];
      r.asymptotic = r.rhs;
      r.assumptions["linearization_small"] = x < 0.1;
      add_truncation(r, bp, c, t);
      break;
    }
    case TheoremId::T5: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      const int m = need(bp.m, "m", id);
      const double th = theta(bp, id);
      r.terms["variance"] = delta * delta * t * m * th / 2.0;
      r.terms["stochastic"] = 2.0 * nO * std::sqrt(r.terms["variance"]);
      r.rhs = r.terms["stochastic"];
      r.asymptotic = r.rhs;
      r.tail = TailBound{2.0 * nO * delta * std::sqrt(2.0 * t * m * th), 0.0};
      add_truncation(r, bp, c, t);
      break;
    }
    case TheoremId::T5b: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      const double th = theta(bp, id);
      const double C = bp.C.value_or(std::pow(2.0, d) * c.Lambda_d);
      r.terms["C"] = C;
      r.terms["bulk"] = 2.0 * std::sqrt(C) * nO * delta * t * th;
      r.terms["boundary"] = nO * bp.supp_O_size * c.K_d * t * delta;
      r.rhs = r.terms["bulk"] + r.terms["boundary"];
      r.asymptotic = r.rhs;
      break;
    }
    case TheoremId::T6: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      const int p = need(bp.p, "p", id);
      const int n = need(bp.n, "n", id);
      const double th = theta(bp, id);
      r.terms["random"] = 2.0 * nO * std::sqrt(2.0 * kPi * c.Upsilon * th) * delta * t / std::sqrt(n);
      r.terms["bias"] = 2.0 * nO * th * (delta * c.Upsilon * t * t / n + c.K * std::pow(t, p + 1) / std::pow(n, p));
      r.rhs = r.terms["random"] + r.terms["bias"];
      r.asymptotic = r.terms["random"];
      add_truncation(r, bp, c, t);
      r.tail = TailBound{2.0 * nO * delta * t * std::sqrt(2.0 * c.Upsilon * th / n), r.rhs - r.terms["random"]};
      break;
    }
    case TheoremId::T7: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      const int p = need(bp.p, "p", id);
      const int n = need(bp.n, "n", id);
      const double th = theta(bp, id);
      const double sn = std::sqrt(static_cast<double>(n));
      r.terms["random"] = 2.0 * nO * std::sqrt(2.0 * kPi * c.Upsilon * th) * delta * (sn + t / sn);
      r.terms["bias"] = 2.0 * nO * th *
                        ((2.0 / 3.0) * c.Upsilon * delta * delta * t + (2.0 / 3.0) * c.Upsilon * delta * t * t / n +
                         c.K * std::pow(t, p + 1) / std::pow(n, p));
      r.rhs = r.terms["random"] + r.terms["bias"];
      r.asymptotic = r.rhs;
      add_truncation(r, bp, c, t);
      r.tail = TailBound{2.0 * nO * delta * std::sqrt(2.0 * n * c.Upsilon * th) * (1.0 + t / n),
                         r.rhs - r.terms["random"]};
      if (delta > 0.0 && delta < 1.0) {
        const OptimalParams op = optimal_params(id, bp);
        r.n_opt = op.n_opt;
        r.l_opt = op.l_opt;
      }
      break;
    }
    case TheoremId::T8: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      const int p = need(bp.p, "p", id);
      const int n = need(bp.n, "n", id);
      const double th = theta(bp, id);
      r.terms["random"] = 2.0 * nO * delta * std::sqrt(2.0 * kPi * c.Upsilon * th * t);
      r.terms["bias"] = 2.0 * nO * th *
                        (delta * c.Upsilon * std::pow(t, 1.5) / std::sqrt(static_cast<double>(n)) +
                         c.K * std::pow(t, p + 1) / std::pow(n, p));
      r.rhs = r.terms["random"] + r.terms["bias"];
      r.asymptotic = r.terms["random"];
      add_truncation(r, bp, c, t);
      break;
    }
    case TheoremId::T9: {
      const double t = need(bp.t, "t", id);
      const double delta = need(bp.delta, "delta", id);
      check_delta(delta, id);
      double J;
      if (bp.jump_norm) {
        J = *bp.jump_norm;
      } else {
        J = need(bp.m, "m (or jump_norm)", id) * theta(bp, id);
      }
      r.terms["jump_norm"] = J;
      r.terms["trace_distance"] = 2.0 * delta * std::sqrt(t * J);
      r.rhs = nO * r.terms["trace_distance"];
      r.asymptotic = r.rhs;
      add_truncation(r, bp, c, t);
      break;
    }
    case TheoremId::Trotter: {
      const double t = need(bp.t, "t", id);
      const int p = need(bp.p, "p", id);
      const int n = need(bp.n, "n", id);
      const double th = theta(bp, id);
      r.terms["K"] = c.K;
      r.rhs = c.K * th * std::pow(std::abs(t), p + 1) / std::pow(n, p);
      r.asymptotic = r.rhs;
      break;
    }
    case TheoremId::Truncation: {
      const double t = need(bp.t, "t", id);
      need(bp.l, "l", id);
      r.rhs = truncation_term(bp, c, t);
      r.terms["envelope"] = bp.supp_O_size * nO * std::exp(-c.mu * (*bp.l - c.v * t));
      r.asymptotic = r.terms["envelope"];
      r.assumptions["l>vt"] = *bp.l > c.v * t;
      break;
    }
    case TheoremId::RandomSum: {
      double T;
      if (bp.T) {
        T = *bp.T;
      } else {
        const int p = need(bp.p, "p", id);
        T = need(bp.n, "n", id) * upsilon(p) * theta(bp, id);
      }
      r.terms["T"] = T;
      r.rhs = std::sqrt(2.0 * kPi * T);
      r.asymptotic = r.rhs;
      r.tail = TailBound{std::sqrt(2.0 * T), 0.0};
      break;
    }
  }
  return r;
}

OptimalParams optimal_params(TheoremId id, const BoundParams& bp) {
  const double t = need(bp.t, "t", id);
  const double delta = need(bp.delta, "delta", id);
  if (!(delta > 0.0) || delta >= 1.0) throw DomainError("optimal_params: delta must lie in (0, 1)");
  if (!(t > 0.0)) throw DomainError("optimal_params: t must be > 0");
  const DerivedConstants c = derive_constants(bp);
  const int d = bp.d;
  const auto ceil_int = [](double x) { return static_cast<int>(std::ceil(x - 1e-9)); };
  OptimalParams op;
  double phi = 0.0;
  switch (id) {
    case TheoremId::T1:
    case TheoremId::T5b:
      phi = delta * std::pow(t, d + 1);
      break;
    case TheoremId::T2:
    case TheoremId::T6: {
      const int p = need(bp.p, "p", id);
      op.n_opt = ceil_int(t / std::pow(delta, 1.0 / p));
      phi = delta * std::pow(t, d + 1);
      break;
    }
    case TheoremId::T3: {
      const int p = need(bp.p, "p", id);
      op.n_opt = ceil_int(t / std::pow(delta, 1.0 / (p + 1)));
      phi = std::pow(delta, p / (p + 1.0)) * std::pow(t, d + 1);
      break;
    }
    case TheoremId::T7: {
      const int p = need(bp.p, "p", id);
      op.n_opt = ceil_int(std::pow(delta, -2.0 / (2 * p + 1)) * std::pow(t, (d + 4) / 3.0));
      phi = std::pow(delta, 2.0 * p / (2 * p + 1)) * std::pow(t, 2.0 * (d + 1) / 3.0);
      break;
    }
    case TheoremId::T4:
    case TheoremId::T5:
    case TheoremId::T8:
    case TheoremId::T9:
      phi = delta * std::pow(t, (d + 1) / 2.0);
      break;
    default:
      throw DomainError("optimal_params: no optimal choice for " + to_string(id));
  }
  op.l_raw = c.v * t - std::log(phi) / c.mu;
  op.l_opt = std::max(0, ceil_int(op.l_raw));
  if (bp.l_max && op.l_opt > *bp.l_max) {
    op.l_opt = *bp.l_max;
    op.l_feasible = false;
  }
  if (op.n_opt) op.n_opt = std::max(1, *op.n_opt);
  return op;
}

}  // namespace stabsim
