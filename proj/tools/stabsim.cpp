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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include "CLI11.hpp"
#include "stabsim/config.hpp"
#include "stabsim/error.hpp"
#include "stabsim/harness.hpp"

namespace fs = std::filesystem;
using namespace stabsim;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitCapacity = 2;
constexpr int kExitViolation = 3;

ExperimentConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig c = load_config(path);
  for (const auto& o : overrides) apply_override(c, o);
  validate(c);
  return c;
}

struct SeriesPoint {
  std::vector<double> values;
  double rhs = std::nan("");
};

// Rows sharing every grid coordinate except `axis`, keyed by the fixed coordinates.
using Series = std::map<std::string, std::map<double, SeriesPoint>>;

Series group_by_axis(const std::vector<CsvRow>& rows, const std::string& axis) {
  static const std::vector<std::string> kAxes = {"p", "n", "l", "t", "delta", "lambda"};
  Series out;
  for (const auto& r : rows) {
    std::string key;
    for (const auto& a : kAxes)
      if (a != axis) key += (key.empty() ? "" : "_") + a + "=" + r.fields.at(a);
    const double v = r.number("delta_rho");
    if (std::isnan(v)) continue;
    SeriesPoint& sp = out[key][r.number(axis)];
    sp.values.push_back(v);
    sp.rhs = r.number("bound_rhs");
  }
  return out;
}

Json fit_all(const std::vector<CsvRow>& rows, double log_q) {
  Json fits = Json::array();
  for (const std::string axis : {"t", "delta", "n", "lambda"}) {
    for (const auto& [key, pts] : group_by_axis(rows, axis)) {
      std::vector<double> x, y;
      for (const auto& [xv, sp] : pts) {
        double mean = 0.0;
        for (double v : sp.values) mean += v;
        mean /= sp.values.size();
        if (xv > 0.0 && std::isfinite(xv) && mean > 0.0) {
          x.push_back(xv);
          y.push_back(mean);
        }
      }
      if (x.size() < 4) continue;
      const ScalingFit f = log_q > 0.0 ? fit_scaling_log_corrected(x, y, log_q, axis) : fit_scaling(x, y, axis);
      fits.push_back({{"axis", axis},
                      {"fixed", key},
                      {"exponent", f.exponent},
                      {"stderr", f.stderr_exponent},
                      {"r2", f.r2},
                      {"intercept", f.intercept},
                      {"window_begin", f.window_begin},
                      {"window_size", f.window_size},
                      {"points", x.size()}});
    }
  }
  return fits;
}

std::string svg_chart(const std::vector<std::tuple<double, double, double, double>>& pts, const std::string& title,
                      bool logx, bool logy) {
  const double W = 480, H = 320, pad = 48;
  const auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  const auto ty = [&](double v) { return logy ? std::log10(std::max(v, 1e-300)) : v; };
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& [x, y, e, b] : pts) {
    x0 = std::min(x0, tx(x));
    x1 = std::max(x1, tx(x));
    for (double v : {y, b})
      if (std::isfinite(v) && v > 0.0) {
        y0 = std::min(y0, ty(v));
        y1 = std::max(y1, ty(v));
      }
  }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const auto px = [&](double v) { return pad + (tx(v) - x0) / (x1 - x0) * (W - 2 * pad); };
  const auto py = [&](double v) { return H - pad - (ty(v) - y0) / (y1 - y0) * (H - 2 * pad); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << pad << "\" y=\"20\" font-size=\"12\">" << title << "</text>\n";
  s << "<polyline fill=\"none\" stroke=\"black\" points=\"";
  for (const auto& [x, y, e, b] : pts)
    if (y > 0.0 || !logy) s << px(x) << ',' << py(y) << ' ';
  s << "\"/>\n<polyline fill=\"none\" stroke=\"red\" stroke-dasharray=\"4\" points=\"";
  for (const auto& [x, y, e, b] : pts)
    if (std::isfinite(b) && (b > 0.0 || !logy)) s << px(x) << ',' << py(b) << ' ';
  s << "\"/>\n</svg>\n";
  return s.str();
}

int report(const std::string& dir, bool svg) {
  const auto rows = read_csv((fs::path(dir) / "results.csv").string());
  int files = 0;
  for (const std::string axis : {"t", "delta", "n", "lambda"}) {
    int series = 0;
    for (const auto& [key, pts] : group_by_axis(rows, axis)) {
      if (pts.size() < 2) continue;
      const std::string stem = "fig_" + axis + "_" + std::to_string(series++);
      std::ofstream out(fs::path(dir) / (stem + ".dat"));
      out << "# " << key << "\n# x y yerr bound_rhs\n";
      std::vector<std::tuple<double, double, double, double>> data;
      for (const auto& [x, sp] : pts) {
        const Summary s = summarize(sp.values);
        out << format_double(x) << ' ' << format_double(s.mean) << ' ' << format_double(s.stderr_mean) << ' '
            << format_double(sp.rhs) << '\n';
        data.emplace_back(x, s.mean, s.stderr_mean, sp.rhs);
      }
      ++files;
      if (svg) {
        const bool logx = std::all_of(data.begin(), data.end(),
                                      [](const auto& d) { return std::get<0>(d) > 0 && std::isfinite(std::get<0>(d)); });
        std::ofstream(fs::path(dir) / (stem + ".svg")) << svg_chart(data, axis + ": " + key, logx, true);
      }
    }
  }
  std::cout << "wrote " << files << " plot-data file(s) to " << dir << "\n";
  return 0;
}

void warn_dt(const SweepResult& r) {
  for (const auto& p : r.points)
    if (p.dt_check && !p.dt_check->converged)
      std::cerr << "warning: point " << p.point.index << ": halving dt changes E[Delta] by "
                << 100.0 * p.dt_check->relative_change << "%\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabsim: stability experiments for noisy quantum simulation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", theorem, results;
  std::vector<std::string> overrides;
  int point = 0, trial = 0, threads = 0;
  bool shuffle = false, svg = false, fresh = false;
  double log_q = 0.0;

  auto* bounds = app.add_subcommand("bounds", "Evaluate theorem bounds at the configured grid points");
  bounds->add_option("--config", config_path, "Experiment config (JSON)")->required();
  bounds->add_option("--theorem", theorem, "Theorem id (default: config theorems)");
  bounds->add_option("--override", overrides, "key=value override");

  auto* trial_cmd = app.add_subcommand("trial", "Run one trial and print its record");
  trial_cmd->add_option("--config", config_path)->required();
  trial_cmd->add_option("--point", point, "Grid point index");
  trial_cmd->add_option("--trial", trial, "Trial index");
  trial_cmd->add_option("--override", overrides);

  auto* sweep = app.add_subcommand("sweep", "Run all grid points and trials");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--override", overrides);
  sweep->add_option("--threads", threads, "Worker threads (default STABSIM_THREADS)");
  sweep->add_flag("--shuffle", shuffle, "Randomize execution order");
  sweep->add_flag("--fresh", fresh, "Ignore previous partial results");

  auto* fit = app.add_subcommand("fit", "Fit scaling exponents to results.csv");
  fit->add_option("--results", results, "results.csv path")->required();
  fit->add_option("--out", out_dir, "Directory for fits.json");
  fit->add_option("--log-q", log_q, "Divide y by log^q(1/y_pred) before fitting");

  auto* check = app.add_subcommand("check", "Sweep and audit bounds; exit 3 on violation");
  check->add_option("--config", config_path)->required();
  check->add_option("--out", out_dir);
  check->add_option("--override", overrides);
  check->add_option("--threads", threads);

  auto* report_cmd = app.add_subcommand("report", "Emit plot-data files from a sweep directory");
  report_cmd->add_option("--out", out_dir, "Sweep output directory");
  report_cmd->add_flag("--svg", svg, "Also write minimal SVG charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*bounds) {
      const ExperimentConfig c = load(config_path, overrides);
      std::vector<std::string> ids = theorem.empty() ? c.theorems : std::vector<std::string>{theorem};
      if (ids.empty()) throw ConfigError("no theorem given");
      Json all = Json::array();
      for (const auto& g : grid_points(c)) {
        const BoundParams bp = bound_params(c, g);
        for (const auto& id : ids) {
          Json j = to_json(eval_bound(parse_theorem(id), bp));
          j["point"] = g.index;
          all.push_back(std::move(j));
        }
      }
      std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
    } else if (*trial_cmd) {
      const ExperimentConfig c = load(config_path, overrides);
      const auto pts = grid_points(c);
      if (point < 0 || point >= static_cast<int>(pts.size())) throw ConfigError("--point out of range");
      std::cout << record_to_json(run_trial(c, pts[point], trial)).dump(2) << "\n";
    } else if (*sweep) {
      const ExperimentConfig c = load(config_path, overrides);
      SweepOptions opt;
      opt.output_dir = out_dir;
      opt.shuffle = shuffle;
      opt.threads = threads;
      opt.resume = !fresh;
      const SweepResult r = run_sweep(c, opt);
      warn_dt(r);
      std::cout << "completed " << r.points.size() << " point(s) x " << c.trials << " trial(s) into " << out_dir
                << "\n";
    } else if (*fit) {
      const Json fits = fit_all(read_csv(results), log_q);
      fs::create_directories(out_dir);
      std::ofstream(fs::path(out_dir) / "fits.json") << fits.dump(2) << "\n";
      std::cout << fits.dump(2) << "\n";
    } else if (*check) {
      const ExperimentConfig c = load(config_path, overrides);
      SweepOptions opt;
      opt.output_dir = out_dir;
      opt.threads = threads;
      const SweepResult r = run_sweep(c, opt);
      warn_dt(r);
      const auto violations = audit_bounds(r);
      Json v = Json::array();
      for (const auto& x : violations)
        v.push_back({{"point", x.point},
                     {"theorem", x.theorem},
                     {"trial", x.trial},
                     {"value", x.value},
                     {"rhs", x.rhs},
                     {"flags", x.flags}});
      std::ofstream(fs::path(out_dir) / "violations.json") << v.dump(2) << "\n";
      std::cout << violations.size() << " violation(s)\n";
      if (!violations.empty()) {
        std::cout << v.dump(2) << "\n";
        return kExitViolation;
      }
    } else if (*report_cmd) {
      return report(out_dir, svg);
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
