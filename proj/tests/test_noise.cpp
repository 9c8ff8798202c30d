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

#include <cmath>

#include "stabsim/error.hpp"
#include "stabsim/metrics.hpp"
#include "stabsim/noise.hpp"

using namespace stabsim;

namespace {

struct Chain {
  LocalHamiltonian ham;
  Observable obs;
  TruncatedHamiltonian trunc;
  Chain(int n, int site, int l)
      : ham(transverse_field_ising(LatticeSpec::chain(n), 1.0, 1.0)),
        obs(Observable::pauli("Z", {{site}})),
        trunc(ham, obs, l) {}
};

LocalHamiltonian single_z(double weight) {
  return custom_hamiltonian(LatticeSpec::chain(1), {CustomTerm{{0}, {PauliTerm{"Z", {{0}}, weight}}}});
}

}  // namespace

TEST_CASE("digital noise at zero strength is the clean product") {
  const Chain c(4, 1, 2);
  const TrotterPlan plan = suzuki_plan(2, 5);
  const Mat clean = product_unitary(plan, c.trunc, 1.0);
  for (DigitalModel m : {DigitalModel::M1, DigitalModel::M2, DigitalModel::DiscreteIto}) {
    NoiseRealization real;
    real.master_seed = 3;
    const Mat V = perturbed_product_unitary(plan, c.trunc, 1.0, {m, 0.0, Ensemble::GueNormalized}, real);
    CHECK(V == clean);
  }
}

TEST_CASE("M1 single gate distance") {
  const TruncatedHamiltonian t(single_z(1.0), Observable::pauli("Z", {{0}}), 0);
  const double delta = 0.05, time = 1.0;
  const int n = 4;
  // one first-order gate per step is emulated by a p=2 plan with n steps; compare a single gate directly
  const Mat U = expm_i_hermitian(pauli('Z'), time / n);
  const Mat V = expm_i_hermitian(Mat(pauli('Z') + delta * pauli('X')), time / n);
  CHECK(operator_norm(V - U) <= delta * time / n);
  const double w = std::sqrt(1.0 + delta * delta);
  CHECK(operator_norm(V - U) <= 2.0 * std::sin(delta * time / (2.0 * n)) * w + 1e-12);
  (void)t;
}

TEST_CASE("noisy products are unitary and telescope") {
  const Chain c(5, 2, 1);
  for (DigitalModel m : {DigitalModel::M1, DigitalModel::M2, DigitalModel::DiscreteIto}) {
    const TrotterPlan plan = suzuki_plan(4, 3);
    NoiseRealization real;
    real.master_seed = 11;
    real.trial_index = 2;
    real.track_gate_distance = true;
    const DigitalNoiseSpec spec{m, 0.1, Ensemble::GueNormalized};
    const Mat V = perturbed_product_unitary(plan, c.trunc, 0.7, spec, real);
    CHECK(is_unitary(V, 1e-9));
    CHECK(operator_norm(V - product_unitary(plan, c.trunc, 0.7)) <= real.gate_distance_sum + 1e-12);
    CHECK(real.gate_count > 0);
  }
}

TEST_CASE("M2 gate distance is at most 2 delta") {
  const TruncatedHamiltonian t(single_z(1.0), Observable::pauli("Z", {{0}}), 0);
  const TrotterPlan plan = suzuki_plan(2, 1);
  NoiseRealization real;
  real.track_gate_distance = true;
  perturbed_product_unitary(plan, t, 0.5, {DigitalModel::M2, 0.2, Ensemble::GueNormalized}, real);
  CHECK(real.gate_distance_sum / real.gate_count <= 2.0 * 0.2);
}

TEST_CASE("same realization twice gives identical products") {
  const Chain c(4, 0, 2);
  const TrotterPlan plan = suzuki_plan(2, 4);
  NoiseRealization a, b;
  a.master_seed = b.master_seed = 99;
  a.trial_index = b.trial_index = 7;
  const DigitalNoiseSpec spec{DigitalModel::M1, 0.3, Ensemble::PauliRademacher};
  CHECK(perturbed_product_unitary(plan, c.trunc, 1.0, spec, a) ==
        perturbed_product_unitary(plan, c.trunc, 1.0, spec, b));
}

TEST_CASE("state and unitary evolutions agree for a fixed source") {
  const Chain c(4, 1, 1);
  std::vector<Mat> L;
  for (std::size_t k = 0; k < c.trunc.n_terms(); ++k)
    L.push_back(pauli_string(std::string(c.trunc.term(k).support.size(), 'Y')));
  const PerturbationSource src = fixed_source(L);
  const TrotterPlan plan = suzuki_plan(2, 3);
  const DigitalNoiseSpec spec{DigitalModel::M2, 0.05, Ensemble::GueNormalized};
  const Vec psi0 = initial_state("plus", c.trunc.n_qubits());
  const Vec a = perturbed_product_state(plan, c.trunc, 1.0, spec, src, psi0);
  const Vec b = perturbed_product_unitary(plan, c.trunc, 1.0, spec, src) * psi0;
  CHECK((a - b).norm() < 1e-12);
}

TEST_CASE("Gaussian paths: constant draw at infinite correlation length") {
  Rng rng = make_rng(1, 0, Stream::kPaths);
  GaussianProcessSpec spec;
  spec.lambda = kInfinity;
  spec.X_ops = {{pauli('X')}};
  const GaussianPaths p = sample_gaussian_paths(spec, 2.0, 10, rng);
  CHECK_THROWS_AS(p.value(1, 0.0), DomainError);
  for (double s : {0.0, 0.3, 1.1, 2.0}) CHECK(p.value(0, s) == p.value(0, 0.0));
}

TEST_CASE("Gaussian paths: covariance and cross-correlation") {
  const double lambda = 0.5;
  const GaussianPathSampler sampler(lambda, 2.0, 33);
  const auto& ts = sampler.times();
  const int draws = 4000;
  double c00 = 0, c0k = 0, cross = 0, v0 = 0, v1 = 0;
  const int k = 8;
  Rng rng = make_rng(2, 0, Stream::kPaths);
  for (int i = 0; i < draws; ++i) {
    const GaussianPaths p = sampler.sample(2, rng);
    c00 += p.values(0, 0) * p.values(0, 0);
    c0k += p.values(0, 0) * p.values(0, k);
    cross += p.values(0, 5) * p.values(1, 5);
    v0 += p.values(0, 5) * p.values(0, 5);
    v1 += p.values(1, 5) * p.values(1, 5);
  }
  const double tau = ts[k] - ts[0];
  CHECK(c00 / draws == doctest::Approx(1.0).epsilon(0.08));
  CHECK(c0k / draws == doctest::Approx(std::exp(-tau * tau / (2 * lambda * lambda))).epsilon(0.1));
  CHECK(std::abs(cross / std::sqrt(v0 * v1)) <= 0.04);
}

TEST_CASE("default grid spacing") {
  CHECK(default_grid_dt(0.1) == doctest::Approx(0.1 / 8));
  CHECK(default_grid_dt(kInfinity) == doctest::Approx(1.0 / 64));
}

TEST_CASE("analog evolution: zero strength and constant noise") {
  const Chain c(4, 1, 1);
  const Mat exact = expm_i_hermitian(assemble_dense(c.trunc), 1.2);
  Rng dir = make_rng(4, 0, Stream::kDirections);
  GaussianProcessSpec spec;
  spec.lambda = kInfinity;
  spec.X_ops = make_noise_directions(c.trunc, 1, Ensemble::GueNormalized, dir);
  Rng pr = make_rng(4, 0, Stream::kPaths);
  const GaussianPaths paths = sample_gaussian_paths(spec, 1.2, 4, pr);

  const AnalogEvolution quiet = evolve_analog(c.trunc, spec, paths, 0.0, 1.2, 1e-10);
  CHECK(operator_norm(quiet.unitary - exact) < 1e-9);

  // constant draws: one exponential of H + delta sum xi X
  std::vector<Mat> L;
  for (std::size_t k = 0; k < c.trunc.n_terms(); ++k) L.push_back(paths.value(static_cast<int>(k), 0.0) * spec.X_ops[k][0]);
  const AnalogEvolution loud = evolve_analog(c.trunc, spec, paths, 0.1, 1.2, 1e-10);
  CHECK(operator_norm(loud.unitary - evolve_analog_static(c.trunc, L, 0.1, 1.2)) < 1e-8);
}

TEST_CASE("analog state evolution matches the propagator") {
  const Chain c(3, 1, 1);
  Rng dir = make_rng(5, 0, Stream::kDirections);
  GaussianProcessSpec spec;
  spec.lambda = 0.3;
  spec.X_ops = make_noise_directions(c.trunc, 2, Ensemble::GueNormalized, dir);
  Rng pr = make_rng(5, 0, Stream::kPaths);
  const GaussianPaths paths = sample_gaussian_paths(spec, 1.0, default_n_grid(0.3, 1.0), pr);
  const Vec psi0 = initial_state("y", c.trunc.n_qubits());
  const auto states = evolve_analog_states(c.trunc, spec, paths, 0.2, {0.5, 1.0}, 1e-3, psi0);
  const AnalogEvolution ev = evolve_analog(c.trunc, spec, paths, 0.2, 1.0, 1e-9);
  CHECK((states[1] - ev.unitary * psi0).norm() < 1e-5);
}

TEST_CASE("white noise: zero strength follows the exact evolution") {
  const Chain c(3, 1, 1);
  Rng dir = make_rng(6, 0, Stream::kDirections);
  const Directions X = make_noise_directions(c.trunc, 1, Ensemble::GueNormalized, dir);
  const Vec psi0 = initial_state("y", c.trunc.n_qubits());
  NoiseRealization real;
  const Vec psi = evolve_white_noise(c.trunc, X, 0.0, 1.0, default_white_dt(0.0), psi0, real);
  CHECK((psi - expm_i_hermitian(assemble_dense(c.trunc), 1.0) * psi0).norm() <= 1e-6);
}

TEST_CASE("white noise: norm is a martingale") {
  const Chain c(2, 0, 1);
  Rng dir = make_rng(7, 0, Stream::kDirections);
  const Directions X = make_noise_directions(c.trunc, 1, Ensemble::GueNormalized, dir);
  const WhiteNoiseIntegrator integ(c.trunc, direction_channels(c.trunc, X), 0.5, 0.01);
  const Vec psi0 = initial_state("zero", c.trunc.n_qubits());
  const int trials = 2000;
  double sum = 0, sum2 = 0;
  for (int k = 0; k < trials; ++k) {
    Rng w = make_rng(7, k, Stream::kWiener);
    const double n2 = integ.evolve(psi0, integ.increments(100, w)).squaredNorm();
    sum += n2;
    sum2 += n2 * n2;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
  CHECK(std::abs(mean - 1.0) <= 4.0 * se + 1e-3);
}

TEST_CASE("coarsen_increments sums consecutive groups") {
  Eigen::MatrixXd fine(2, 6);
  fine << 1, 2, 3, 4, 5, 6, -1, -1, 0, 0, 2, 2;
  const Eigen::MatrixXd coarse = coarsen_increments(fine, 2);
  REQUIRE(coarse.cols() == 3);
  CHECK(coarse(0, 0) == 3);
  CHECK(coarse(0, 2) == 11);
  CHECK(coarse(1, 0) == -2);
  CHECK_THROWS(coarsen_increments(fine, 4));
}

TEST_CASE("Lindblad: zero strength is unitary conjugation") {
  const Chain c(3, 1, 1);
  const Vec psi0 = initial_state("y", c.trunc.n_qubits());
  const Mat rho0 = psi0 * psi0.adjoint();
  const Mat U = expm_i_hermitian(assemble_dense(c.trunc), 0.8);
  LindbladSpec spec;
  spec.delta = 0.0;
  spec.jumps = {LocalOperator{c.trunc.term(0).support, pauli_string(std::string(c.trunc.term(0).support.size(), 'X'))}};
  CHECK((lindblad_propagate(c.trunc, spec, rho0, 0.8) - U * rho0 * U.adjoint()).norm() < 1e-10);
}

TEST_CASE("Lindblad: dephasing and valid output") {
  const TruncatedHamiltonian t(single_z(0.0), Observable::pauli("Z", {{0}}), 0);
  const LindbladSpec spec{{LocalOperator{Region(std::vector<Site>{{0}}), pauli('Z')}}, 0.4};
  const Vec plus = initial_state("plus", 1);
  const Mat r = lindblad_propagate(t, spec, Mat(plus * plus.adjoint()), 1.5);
  CHECK(std::abs(r(0, 1) - 0.5 * std::exp(-2 * 0.16 * 1.5)) < 1e-10);
  CHECK_NOTHROW(validate_density(r));
}

TEST_CASE("Lindblad trajectories approach the propagator") {
  const Chain c(2, 0, 1);
  Rng dir = make_rng(8, 0, Stream::kDirections);
  const Directions X = make_noise_directions(c.trunc, 1, Ensemble::GueNormalized, dir);
  const LindbladSpec spec{direction_channels(c.trunc, X), 0.3};
  const Vec psi0 = initial_state("plus", 2);
  const Mat exact = lindblad_propagate(c.trunc, spec, Mat(psi0 * psi0.adjoint()), 1.0);
  Mat avg = lindblad_trajectories(c.trunc, spec, psi0, 1.0, 0.005, 800, 8);
  avg /= avg.trace();
  CHECK(trace_distance(avg, exact) < 0.06);
}

TEST_CASE("Brownian limit generator") {
  const Chain c(3, 1, 1);
  const TrotterPlan plan = suzuki_plan(2, 1);
  const LindbladSpec spec = brownian_limit_spec(c.trunc, plan, 0.1);
  CHECK(spec.delta == doctest::Approx(0.1 * std::sqrt(2.0)));
  std::size_t expect = 0;
  for (std::size_t k = 0; k < c.trunc.n_terms(); ++k) expect += (std::size_t{1} << (2 * c.trunc.term(k).support.size())) - 1;
  CHECK(spec.jumps.size() == expect);
  for (const auto& j : spec.jumps) CHECK(operator_norm(j.matrix) <= 1.0);
}
