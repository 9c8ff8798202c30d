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
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stabsim/linalg.hpp"
#include "stabsim/operators.hpp"
#include "stabsim/rng.hpp"
#include "stabsim/trotter.hpp"

namespace stabsim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class DigitalModel { M1, M2, DiscreteIto };
DigitalModel parse_digital_model(const std::string& name);
std::string to_string(DigitalModel m);

struct DigitalNoiseSpec {
  DigitalModel model = DigitalModel::M1;
  double delta = 0.0;
  Ensemble ensemble = Ensemble::GueNormalized;
};

// Gate generator (t/n) a H + w L; returns w.
double perturbation_weight(const DigitalNoiseSpec& spec, double t, int n);

struct NoiseRealization {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  bool track_gate_distance = false;
  double gate_distance_sum = 0.0;
  long gate_count = 0;
  double max_norm_drift = 0.0;
  bool norm_warning = false;
};

// L for the gate of term k in stage u of Trotter step j.
using PerturbationSource = std::function<Mat(int j, int u, std::size_t k)>;
PerturbationSource random_source(const TruncatedHamiltonian& trunc, Ensemble ensemble, Rng& rng);
PerturbationSource fixed_source(std::vector<Mat> per_term);

Mat perturbed_product_unitary(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t,
                              const DigitalNoiseSpec& spec, NoiseRealization& realization);
Mat perturbed_product_unitary(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t,
                              const DigitalNoiseSpec& spec, const PerturbationSource& source,
                              NoiseRealization* diag = nullptr);
Vec perturbed_product_state(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t,
                            const DigitalNoiseSpec& spec, NoiseRealization& realization, const Vec& psi0);
Vec perturbed_product_state(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t,
                            const DigitalNoiseSpec& spec, const PerturbationSource& source, const Vec& psi0,
                            NoiseRealization* diag = nullptr);

// Directions X_{k,a}: m unit-norm Hermitian operators on the support of
// each retained term k.
using Directions = std::vector<std::vector<Mat>>;
Directions make_noise_directions(const TruncatedHamiltonian& trunc, int m, Ensemble ensemble, Rng& rng);
// Flattened channel list (k-major, then a).
std::vector<LocalOperator> direction_channels(const TruncatedHamiltonian& trunc, const Directions& X);

struct GaussianProcessSpec {
  int m = 1;
  double lambda = kInfinity;
  double grid_dt = 0.0;  // 0: default rule
  Directions X_ops;

  int channels() const;
};

// Finer of lambda/8 and 1/64.
double default_grid_dt(double lambda);
int default_n_grid(double lambda, double t_final, double grid_dt = 0.0);

struct GaussianPaths {
  std::vector<double> times;
  Eigen::MatrixXd values;  // channels x grid
  bool constant = false;

  // Piecewise-linear interpolation in time.
  double value(int channel, double s) const;
};

// Cholesky factor of the covariance exp(-(t_i - t_j)^2 / 2 lambda^2) on a
// uniform grid over [0, t_final]; reused across draws.
class GaussianPathSampler {
 public:
  GaussianPathSampler(double lambda, double t_final, int n_grid);
  GaussianPaths sample(int channels, Rng& rng) const;
  const std::vector<double>& times() const { return times_; }

 private:
  double lambda_;
  std::vector<double> times_;
  Eigen::MatrixXd chol_;
};

GaussianPaths sample_gaussian_paths(const GaussianProcessSpec& spec, double t_final, int n_grid, Rng& rng);

struct AnalogEvolution {
  Mat unitary;
  int steps = 1;
  double last_change = 0.0;
};

// Time-ordered propagator of H + delta sum_c xi_c(s) X_c by midpoint
// stepping with step halving until successive results differ by < tol.
AnalogEvolution evolve_analog(const TruncatedHamiltonian& trunc, const GaussianProcessSpec& spec,
                              const GaussianPaths& paths, double delta, double t, double tol);
// exp(-i t (H + delta sum_k L_k)) with L_k on the support of term k.
Mat evolve_analog_static(const TruncatedHamiltonian& trunc, const std::vector<Mat>& L, double delta, double t);

// Fixed-step midpoint evolution of a state; returns the state at each
// requested time (rounded to the step grid).
std::vector<Vec> evolve_analog_states(const TruncatedHamiltonian& trunc, const GaussianProcessSpec& spec,
                                      const GaussianPaths& paths, double delta, const std::vector<double>& times,
                                      double step, const Vec& psi0);

double default_white_dt(double delta);

// Exponential Euler-Maruyama for
//   dpsi = (-iH - delta^2/2 sum X^2) psi dt - i delta sum X psi dW.
class WhiteNoiseIntegrator {
 public:
  WhiteNoiseIntegrator(const TruncatedHamiltonian& trunc, std::vector<LocalOperator> channels, double delta,
                       double dt);

  int channels() const { return static_cast<int>(channels_.size()); }
  double dt() const { return dt_; }
  Eigen::MatrixXd increments(int steps, Rng& rng) const;
  Vec evolve(const Vec& psi0, const Eigen::MatrixXd& dW, NoiseRealization* diag = nullptr) const;
  // States after each step count in checkpoints (ascending).
  std::vector<Vec> evolve_series(const Vec& psi0, const Eigen::MatrixXd& dW, const std::vector<int>& checkpoints,
                                 NoiseRealization* diag = nullptr) const;

 private:
  int n_qubits_;
  double delta_;
  double dt_;
  std::vector<LocalOperator> channels_;
  std::vector<std::vector<int>> positions_;
  Mat drift_;
};

// Sums consecutive groups of `factor` increments (Brownian coupling across dt).
Eigen::MatrixXd coarsen_increments(const Eigen::MatrixXd& fine, int factor);

Vec evolve_white_noise(const TruncatedHamiltonian& trunc, const Directions& X, double delta, double t, double dt,
                       const Vec& psi0, NoiseRealization& realization);

struct LindbladSpec {
  std::vector<LocalOperator> jumps;  // Hermitian, norm <= 1
  double delta = 0.0;
};

Mat lindblad_superoperator(const TruncatedHamiltonian& trunc, const LindbladSpec& spec);
// Direct superoperator exponential; dim <= 64.
Mat lindblad_propagate(const TruncatedHamiltonian& trunc, const LindbladSpec& spec, const Mat& rho0, double t);
// Average of white-noise trajectories; pure initial state.
Mat lindblad_trajectories(const TruncatedHamiltonian& trunc, const LindbladSpec& spec, const Vec& psi0, double t,
                          double dt, int trials, std::uint64_t master_seed);

// Generator of the n -> infinity average of the discrete-Ito circuit with
// Pauli-Rademacher perturbations: strength delta sqrt(Upsilon) and jumps
// P / sqrt(4^q - 1) for every non-identity Pauli string P on each term support.
LindbladSpec brownian_limit_spec(const TruncatedHamiltonian& trunc, const TrotterPlan& plan, double delta);

}  // namespace stabsim
