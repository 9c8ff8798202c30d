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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "stabsim/bounds.hpp"
#include "stabsim/config.hpp"
#include "stabsim/metrics.hpp"

namespace stabsim {

struct TrialRecord {
  int point = 0;
  int trial = 0;
  ErrorSample sample;
  double runtime_ms = 0.0;
  std::vector<std::string> flags;
  std::optional<std::string> error;  // failed trials stay in the record set
};

struct Summary {
  int count = 0;
  int failed = 0;
  double mean = 0.0;
  double std = 0.0;
  double stderr_mean = 0.0;
  double max = 0.0;
  std::map<std::string, double> quantiles;  // q50, q90, q99
};

Summary summarize(const std::vector<double>& values);

// E[Delta] of the white-noise integrator at dt and dt/2 on coupled increments.
struct DtCheck {
  double dt = 0.0;
  int paths = 0;
  double mean_coarse = 0.0;
  double mean_fine = 0.0;
  double relative_change = 0.0;
  bool converged = true;  // relative_change <= 2%
};

struct PointResult {
  GridPoint point;
  std::vector<TrialRecord> trials;
  Summary summary;     // over delta_rho
  std::vector<BoundReport> bounds;
  double runtime_ms = 0.0;
  std::optional<DtCheck> dt_check;  // white-noise points only
};

struct SweepResult {
  std::vector<PointResult> points;
};

// Everything a trial at one grid point needs that does not depend on the trial index.
class PointContext;

class TrialRunner {
 public:
  explicit TrialRunner(ExperimentConfig config);
  ~TrialRunner();
  TrialRunner(const TrialRunner&) = delete;
  TrialRunner& operator=(const TrialRunner&) = delete;

  const ExperimentConfig& config() const { return config_; }
  const std::vector<GridPoint>& points() const { return points_; }

  TrialRecord run(int point, int trial) const;
  std::vector<BoundReport> bounds(int point) const;

 private:
  const PointContext& context(int point) const;

  ExperimentConfig config_;
  LocalHamiltonian ham_;
  Observable obs_;
  std::vector<GridPoint> points_;
  mutable std::map<int, std::unique_ptr<PointContext>> cache_;
  mutable std::mutex mutex_;
};

TrialRecord run_trial(const ExperimentConfig& config, const GridPoint& point, int trial_index);

struct SweepOptions {
  std::string output_dir;  // empty: nothing persisted
  bool shuffle = false;    // randomized execution order
  std::uint64_t shuffle_seed = 0;
  int threads = 0;         // 0: STABSIM_THREADS or hardware concurrency
  bool resume = true;
};

SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

int thread_count_from_env();

DtCheck white_noise_dt_check(const ExperimentConfig& config, const GridPoint& point, int paths);

void write_csv(const ExperimentConfig& config, const SweepResult& result, const std::string& path);
Json summary_json(const ExperimentConfig& config, const SweepResult& result);
Json record_to_json(const TrialRecord& r);
TrialRecord record_from_json(const Json& j);
std::string manifest_hash(const ExperimentConfig& config);

struct CsvRow {
  std::map<std::string, std::string> fields;
  double number(const std::string& key) const;
};
std::vector<CsvRow> read_csv(const std::string& path);

struct ScalingFit {
  std::string axis;
  double exponent = 0.0;
  double intercept = 0.0;  // log y at log x = 0
  double stderr_exponent = 0.0;
  double r2 = 0.0;
  std::size_t window_begin = 0;  // index into the x-sorted input
  std::size_t window_size = 0;
};

// Least squares of log y on log x; drops smallest-x points until r^2 >= 0.98 or four remain.
ScalingFit fit_scaling(std::vector<double> x, std::vector<double> y, const std::string& axis = "x",
                       bool auto_window = true);
// Divides y by log^q(1/y_pred) before fitting.
ScalingFit fit_scaling_log_corrected(const std::vector<double>& x, const std::vector<double>& y, double q,
                                     const std::string& axis = "x");

struct TailPoint {
  double s = 0.0;
  double threshold = 0.0;
  int exceed = 0;
  int total = 0;
  double fraction = 0.0;
  double upper99 = 1.0;  // one-sided Clopper-Pearson
  double lower99 = 0.0;
};

std::vector<TailPoint> tail_estimate(const std::vector<double>& samples, double scale,
                                     const std::vector<double>& s_values, double offset = 0.0);
double clopper_pearson_upper(int k, int n, double confidence);
double clopper_pearson_lower(int k, int n, double confidence);

struct Violation {
  int point = 0;
  std::string theorem;
  int trial = -1;  // -1: mean-based
  double value = 0.0;
  double rhs = 0.0;
  std::vector<std::string> flags;
};

std::vector<Violation> audit_bounds(const SweepResult& sweep);

BoundParams bound_params(const ExperimentConfig& config, const GridPoint& point);

}  // namespace stabsim
