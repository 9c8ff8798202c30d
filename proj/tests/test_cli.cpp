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

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "stabsim/config.hpp"
#include "stabsim/error.hpp"

using namespace stabsim;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(STABSIM_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stabsim_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const Json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

const std::string kShipped = std::string(STABSIM_SOURCE_DIR) + "/configs/acceptance.json";

}  // namespace

TEST_CASE("config: canonical round trip") {
  ExperimentConfig c = load_config(kShipped);
  CHECK(config_from_json(config_to_json(c)) == c);
  CHECK(canonical_string(config_from_json(Json::parse(canonical_string(c)))) == canonical_string(c));

  c.model.model = "custom";
  c.model.terms = {CustomTermConfig{{0}, {PauliTermConfig{"XZ", {{0}, {1}}, 0.5}}}};
  c.grid.lambda = {0.25, std::numeric_limits<double>::infinity()};
  CHECK(config_from_json(config_to_json(c)) == c);
}

TEST_CASE("config: unknown keys and bad values are rejected") {
  Json j = config_to_json(ExperimentConfig{});
  j["noise"]["colour"] = "pink";
  CHECK_THROWS_AS(config_from_json(j), ConfigError);

  ExperimentConfig c;
  c.noise.model = "thermal";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = ExperimentConfig{};
  c.grid.t = {};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = ExperimentConfig{};
  c.trials = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = ExperimentConfig{};
  c.model.extent = {16};
  c.grid.l = {14};
  CHECK_THROWS_AS(validate(c), CapacityError);
}

TEST_CASE("config: overrides are type checked") {
  ExperimentConfig c;
  apply_override(c, "trials=7");
  CHECK(c.trials == 7);
  apply_override(c, "grid.delta=0.25");
  CHECK(c.grid.delta == std::vector<double>{0.25});
  apply_override(c, "grid.n=[2,4]");
  CHECK(c.grid.n == std::vector<int>{2, 4});
  apply_override(c, "noise.model=M2");
  CHECK(c.noise.model == "M2");
  CHECK_THROWS_AS(apply_override(c, "trials=many"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "grid.colour=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "no_equals_sign"), ConfigError);
}

TEST_CASE("config: grid order keeps t innermost") {
  ExperimentConfig c;
  c.grid.t = {1, 2};
  c.grid.delta = {0.1, 0.2};
  const auto pts = grid_points(c);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].t == 1);
  CHECK(pts[1].t == 2);
  CHECK(pts[1].delta == 0.1);
  CHECK(pts[2].delta == 0.2);
  for (int i = 0; i < 4; ++i) CHECK(pts[i].index == i);
}

TEST_CASE("numbers carry 17 significant digits") {
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("cli: bounds prints a report") {
  const Run r = run("bounds --theorem T1 --config " + kShipped + " --override grid.t=1 grid.delta=0.01 grid.n=8");
  CHECK(r.status == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["theorem"] == "T1");
  CHECK(j["rhs"].get<double>() == doctest::Approx(0.2718281828459045));
  CHECK(j.contains("flags"));
}

TEST_CASE("cli: sweep is reproducible") {
  const fs::path dir = scratch("sweep");
  const std::string base = "sweep --fresh --config " + kShipped + " --override trials=2 --threads 1 --out ";
  REQUIRE(run(base + (dir / "a").string()).status == 0);
  REQUIRE(run(base + (dir / "b").string()).status == 0);
  const std::string a = slurp(dir / "a" / "results.csv");
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(dir / "b" / "results.csv"));
  CHECK(fs::exists(dir / "a" / "summary.json"));
  CHECK(fs::exists(dir / "a" / "results.jsonl"));
}

TEST_CASE("cli: fit and report read a sweep directory") {
  const fs::path dir = scratch("fit");
  Json j = config_to_json(load_config(kShipped));
  j["grid"]["n"] = {8, 16, 32, 64, 128};
  j["grid"]["t"] = {1.0};
  j["grid"]["delta"] = {0.1};
  j["trials"] = 10;
  const fs::path cfg = write_config(dir, j);
  REQUIRE(run("sweep --config " + cfg.string() + " --out " + (dir / "out").string()).status == 0);
  CHECK(run("fit --results " + (dir / "out" / "results.csv").string() + " --out " + (dir / "out").string()).status ==
        0);
  const Json fits = Json::parse(slurp(dir / "out" / "fits.json"));
  CHECK_FALSE(fits.empty());
  CHECK(run("report --out " + (dir / "out").string() + " --svg").status == 0);
  bool dat = false, svg = false;
  for (const auto& e : fs::directory_iterator(dir / "out")) {
    dat = dat || e.path().extension() == ".dat";
    svg = svg || e.path().extension() == ".svg";
  }
  CHECK(dat);
  CHECK(svg);
}

TEST_CASE("cli: exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(run("check --config " + kShipped + " --out " + (dir / "ok").string()).status == 0);

  Json bad = config_to_json(ExperimentConfig{});
  bad["mystery"] = 1;
  CHECK(run("sweep --config " + write_config(dir, bad).string() + " --out " + (dir / "bad").string()).status == 1);
  CHECK(run("sweep --config " + (dir / "missing.json").string()).status == 1);

  Json big = config_to_json(ExperimentConfig{});
  big["model"]["extent"] = {16};
  big["grid"]["l"] = {14};
  CHECK(run("sweep --config " + write_config(dir, big).string() + " --out " + (dir / "big").string()).status == 2);

  // a single first-order-ish step breaks the analog worst-case bound by far
  Json broken = config_to_json(ExperimentConfig{});
  broken["grid"]["delta"] = {1e-6};
  broken["grid"]["n"] = {1};
  broken["theorems"] = {"T1"};
  broken["worst_case"] = true;
  CHECK(run("check --config " + write_config(dir, broken).string() + " --out " + (dir / "viol").string()).status ==
        3);
  CHECK(fs::exists(dir / "viol" / "violations.json"));
}
