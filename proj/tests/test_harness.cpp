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

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "stabsim/error.hpp"
#include "stabsim/harness.hpp"

using namespace stabsim;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const std::string& noise, double delta) {
  ExperimentConfig c;
  c.model.extent = {4};
  c.observable.sites = {{1}};
  c.initial_state = "y";
  c.noise.model = noise;
  c.grid.t = {0.5, 1.0};
  c.grid.delta = {delta};
  c.grid.n = {4};
  c.grid.l = {1};
  c.trials = 6;
  c.master_seed = 17;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stabsim_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("summarize") {
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0, std::nan("")});
  CHECK(s.count == 4);
  CHECK(s.failed == 1);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.max == 4.0);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.stderr_mean == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(s.quantiles.at("q50") >= 2.0);
  CHECK(s.quantiles.at("q50") <= 3.0);
}

TEST_CASE("zero-strength trials reproduce the exact evolution") {
  for (const char* model : {"none", "M1", "M2", "discrete_ito", "analog_static", "analog_gaussian", "white_noise",
                            "lindblad"}) {
    ExperimentConfig c = small_config(model, 0.0);
    c.grid.n = {64};
    c.grid.p = {4};
    c.grid.l = {3};  // full chain, so the product formula is the only error source
    const GridPoint pt = grid_points(c)[1];
    const TrialRecord r = run_trial(c, pt, 0);
    CAPTURE(model);
    CHECK_FALSE(r.error.has_value());
    const bool digital = std::string(model) == "M1" || std::string(model) == "M2" || std::string(model) == "discrete_ito";
    // the digital models retain a Trotter error; the white-noise integrator a step error
    const double tol = digital ? 1e-6 : std::string(model) == "white_noise" ? 1e-6 : 1e-8;
    CHECK(r.sample.delta_rho <= tol);
  }
}

TEST_CASE("trials are deterministic in (seed, index)") {
  for (const char* model : {"M1", "analog_gaussian", "white_noise"}) {
    const ExperimentConfig c = small_config(model, 0.1);
    const GridPoint pt = grid_points(c)[0];
    const TrialRecord a = run_trial(c, pt, 3), b = run_trial(c, pt, 3), other = run_trial(c, pt, 4);
    CHECK(a.sample.delta_rho == b.sample.delta_rho);
    CHECK(a.sample.hs_distance == b.sample.hs_distance);
    CHECK(a.sample.delta_rho != other.sample.delta_rho);
  }
}

TEST_CASE("sweep is independent of order and thread count") {
  const ExperimentConfig c = small_config("M1", 0.1);
  SweepOptions serial;
  serial.threads = 1;
  SweepOptions mixed;
  mixed.threads = 3;
  mixed.shuffle = true;
  mixed.shuffle_seed = 5;
  const SweepResult a = run_sweep(c, serial), b = run_sweep(c, mixed);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    REQUIRE(a.points[i].trials.size() == static_cast<std::size_t>(c.trials));
    CHECK(a.points[i].summary.mean == b.points[i].summary.mean);
    for (std::size_t k = 0; k < a.points[i].trials.size(); ++k)
      CHECK(a.points[i].trials[k].sample.delta_rho == b.points[i].trials[k].sample.delta_rho);
  }
}

TEST_CASE("persisted sweep: files, resume and csv round trip") {
  ExperimentConfig c = small_config("M2", 0.05);
  c.theorems = {"T7"};
  const fs::path dir = scratch("persist");
  SweepOptions opt;
  opt.output_dir = dir.string();
  opt.threads = 1;
  const SweepResult first = run_sweep(c, opt);
  for (const char* f : {"results.csv", "results.jsonl", "summary.json", "manifest.json"}) CHECK(fs::exists(dir / f));
  const std::string csv = slurp(dir / "results.csv");

  const SweepResult resumed = run_sweep(c, opt);
  CHECK(slurp(dir / "results.csv") == csv);
  CHECK(resumed.points[1].summary.mean == first.points[1].summary.mean);

  const auto rows = read_csv((dir / "results.csv").string());
  REQUIRE(rows.size() == 2u * c.trials);
  CHECK(rows[0].fields.at("model") == "tfim:M2");
  CHECK(rows[0].number("delta") == 0.05);
  CHECK(rows[0].number("delta_rho") == first.points[0].trials[0].sample.delta_rho);
  CHECK(rows[0].number("runtime_ms") == 0.0);
}

TEST_CASE("trial records survive json") {
  TrialRecord r;
  r.point = 2;
  r.trial = 9;
  r.sample.delta_rho = 0.1 + 1e-17;
  r.sample.hs_distance = 1.0 / 3.0;
  r.flags = {"norm_warning"};
  r.error = "boom";
  const TrialRecord back = record_from_json(record_to_json(r));
  CHECK(back.point == 2);
  CHECK(back.trial == 9);
  CHECK(back.sample.delta_rho == r.sample.delta_rho);
  CHECK(back.sample.hs_distance == r.sample.hs_distance);
  CHECK_FALSE(back.sample.delta_wc.has_value());
  CHECK(back.flags == r.flags);
  CHECK(back.error == r.error);
}

TEST_CASE("fit_scaling on synthetic data") {
  std::vector<double> x, y, noisy, flat;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 1; i <= 10; ++i) {
    x.push_back(i);
    y.push_back(3.0 * i * i);
    noisy.push_back(std::sqrt(i) * (1 + 0.01 * g(rng)));
    flat.push_back(2.0);
  }
  const ScalingFit a = fit_scaling(x, y);
  CHECK(a.exponent == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::exp(a.intercept) == doctest::Approx(3.0));
  CHECK(a.r2 == doctest::Approx(1.0));
  CHECK(std::abs(fit_scaling(x, noisy).exponent - 0.5) <= 0.02);
  CHECK(std::abs(fit_scaling(x, flat).exponent) < 1e-12);
  CHECK_THROWS_AS(fit_scaling({1, 2, 3}, {1, 2, 3}), DomainError);
  CHECK_THROWS_AS(fit_scaling({1, 2, 3, 4}, {1, 0, 3, 4}), DomainError);
}

TEST_CASE("fit window drops pre-asymptotic points") {
  std::vector<double> x, y;
  for (int i = 0; i < 8; ++i) {
    const double n = std::pow(2.0, i);
    x.push_back(n);
    y.push_back(i < 3 ? 1.0 : 1.0 / (n * n));
  }
  const ScalingFit f = fit_scaling(x, y, "n");
  CHECK(f.window_begin >= 3);
  CHECK(f.window_size >= 4);
  CHECK(f.exponent == doctest::Approx(-2.0));
}

TEST_CASE("tail estimates") {
  std::vector<double> s;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20000; ++i) s.push_back(std::abs(g(rng)));
  const auto tp = tail_estimate(s, 1.0, {2.0, 100.0});
  CHECK(tp[0].lower99 <= 0.0455);
  CHECK(tp[0].upper99 >= 0.0455);
  CHECK(tp[0].fraction == doctest::Approx(0.0455).epsilon(0.15));
  CHECK(tp[1].exceed == 0);
  CHECK(tp[1].fraction == 0.0);
  CHECK_THROWS_AS(tail_estimate({1.0, 2.0}, 1.0, {1.0}), DomainError);
}

TEST_CASE("Clopper-Pearson limits") {
  CHECK(clopper_pearson_upper(0, 1000, 0.99) == doctest::Approx(1 - std::pow(0.01, 1e-3)));
  CHECK(clopper_pearson_lower(0, 1000, 0.99) == 0.0);
  CHECK(clopper_pearson_lower(1000, 1000, 0.99) == doctest::Approx(std::pow(0.01, 1e-3)));
  CHECK(clopper_pearson_upper(50, 1000, 0.99) > 0.05);
  CHECK(clopper_pearson_lower(50, 1000, 0.99) < 0.05);
}

TEST_CASE("standard error shrinks with the trial count") {
  ExperimentConfig c = small_config("M1", 0.2);
  c.grid.t = {1.0};
  c.grid.n = {8};
  c.trials = 250;
  SweepOptions opt;
  opt.threads = 1;
  const double se250 = run_sweep(c, opt).points[0].summary.stderr_mean;
  c.trials = 1000;
  const double se1000 = run_sweep(c, opt).points[0].summary.stderr_mean;
  CHECK(se250 / se1000 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("audit_bounds") {
  ExperimentConfig quiet = small_config("M1", 0.0);
  quiet.theorems = {"T6", "T2"};
  quiet.worst_case = true;
  SweepOptions opt;
  opt.threads = 1;
  CHECK(audit_bounds(run_sweep(quiet, opt)).empty());

  ExperimentConfig noisy = small_config("M1", 0.2);
  noisy.theorems = {"T6", "T2"};
  noisy.worst_case = true;
  SweepResult s = run_sweep(noisy, opt);
  CHECK(audit_bounds(s).empty());
  // sabotaged right-hand sides must be caught
  for (auto& p : s.points)
    for (auto& b : p.bounds) b.rhs = 0.5 * p.summary.mean;
  const auto v = audit_bounds(s);
  CHECK_FALSE(v.empty());
  bool mean_based = false, per_trial = false;
  for (const auto& x : v) (x.trial < 0 ? mean_based : per_trial) = true;
  CHECK(mean_based);
  CHECK(per_trial);
}

TEST_CASE("capacity errors surface from the sweep") {
  ExperimentConfig c = small_config("M1", 0.1);
  c.model.extent = {16};
  c.grid.l = {14};
  CHECK_THROWS_AS(run_sweep(c), CapacityError);
}

TEST_CASE("Lindblad above 64 dimensions falls back to trajectories") {
  ExperimentConfig c = small_config("lindblad", 0.0);
  c.model.extent = {7};
  c.observable.sites = {{3}};
  c.grid.l = {3};
  c.grid.t = {0.5};
  c.noise.trajectories = 4;
  const TrialRecord quiet = run_trial(c, grid_points(c)[0], 0);
  REQUIRE_FALSE(quiet.error.has_value());
  CHECK(std::find(quiet.flags.begin(), quiet.flags.end(), "lindblad_trajectories") != quiet.flags.end());
  CHECK(quiet.sample.delta_rho <= 1e-6);

  c.grid.delta = {0.3};
  const TrialRecord a = run_trial(c, grid_points(c)[0], 1), b = run_trial(c, grid_points(c)[0], 1);
  CHECK(a.sample.delta_rho == b.sample.delta_rho);
  CHECK(a.sample.delta_rho > 0.0);
}

TEST_CASE("white-noise step check") {
  ExperimentConfig c = small_config("white_noise", 0.1);
  c.grid.t = {1.0};
  const DtCheck ok = white_noise_dt_check(c, grid_points(c)[0], 40);
  CHECK(ok.converged);
  CHECK(ok.relative_change <= 0.02);
  CHECK(ok.mean_fine > 0.0);

  c.noise.dt = 0.25;  // far too coarse
  c.grid.delta = {0.5};
  const DtCheck coarse = white_noise_dt_check(c, grid_points(c)[0], 40);
  CHECK_FALSE(coarse.converged);

  c.noise.dt.reset();
  c.grid.delta = {0.1};
  c.trials = 3;
  const SweepResult s = run_sweep(c);
  REQUIRE(s.points[0].dt_check.has_value());
  CHECK(s.points[0].dt_check->paths == 3);
}
