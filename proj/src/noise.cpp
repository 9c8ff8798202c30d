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

#include "stabsim/noise.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

#include "stabsim/error.hpp"

namespace stabsim {

namespace {

const cplx kI(0.0, 1.0);

void apply_gate(const Mat& g, const std::vector<int>& pos, int n, Vec& psi) { apply_local(g, pos, n, psi); }
void apply_gate(const Mat& g, const std::vector<int>& pos, int n, Mat& U) { apply_local(g, pos, n, U); }

template <class State>
void noisy_product(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t, const DigitalNoiseSpec& spec,
                   const PerturbationSource& source, State& state, NoiseRealization* diag) {
  if (spec.delta < 0.0) throw DomainError("digital noise: delta must be >= 0");
  const TermSpectra spectra(trunc);
  const auto gates = step_gates(plan, trunc.n_terms());
  const double h = t / plan.n;
  const double w = perturbation_weight(spec, t, plan.n);
  std::vector<Mat> clean;
  clean.reserve(gates.size());
  for (const auto& g : gates) clean.push_back(spectra.gate(g.term, h * g.coeff));
  const int nq = trunc.n_qubits();
  for (int j = 0; j < plan.n; ++j) {
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const auto& g = gates[i];
      if (spec.delta == 0.0) {
        apply_gate(clean[i], trunc.positions(g.term), nq, state);
        continue;
      }
      const Mat L = source(j, g.stage, g.term);
      const Mat G = (h * g.coeff) * trunc.term(g.term).matrix + w * L;
      const Mat V = expm_i_hermitian(0.5 * (G + G.adjoint()), 1.0);
      if (diag) {
        ++diag->gate_count;
        if (diag->track_gate_distance) diag->gate_distance_sum += operator_norm(V - clean[i]);
      }
      apply_gate(V, trunc.positions(g.term), nq, state);
    }
  }
}

std::vector<Mat> dense_channels(const TruncatedHamiltonian& trunc, const std::vector<LocalOperator>& ch) {
  std::vector<Mat> out;
  out.reserve(ch.size());
  for (const auto& c : ch) out.push_back(extend(c, trunc.region()));
  return out;
}

Mat hamiltonian_at(const Mat& H0, const std::vector<Mat>& X, const GaussianPaths& paths, double delta, double s) {
  Mat H = H0;
  for (std::size_t c = 0; c < X.size(); ++c) H += (delta * paths.value(static_cast<int>(c), s)) * X[c];
  return H;
}

Mat midpoint_propagator(const Mat& H0, const std::vector<Mat>& X, const GaussianPaths& paths, double delta, double t,
                        int steps) {
  const double h = t / steps;
  Mat U = Mat::Identity(H0.rows(), H0.cols());
  for (int i = 0; i < steps; ++i) U = (expm_i_hermitian(hamiltonian_at(H0, X, paths, delta, (i + 0.5) * h), h) * U).eval();
  return U;
}

}  // namespace

DigitalModel parse_digital_model(const std::string& name) {
  if (name == "M1") return DigitalModel::M1;
  if (name == "M2") return DigitalModel::M2;
  if (name == "discrete_ito" || name == "DiscreteIto") return DigitalModel::DiscreteIto;
  throw ConfigError("unknown digital noise model '" + name + "'");
}

std::string to_string(DigitalModel m) {
  switch (m) {
    case DigitalModel::M1: return "M1";
    case DigitalModel::M2: return "M2";
    default: return "discrete_ito";
  }
}

double perturbation_weight(const DigitalNoiseSpec& spec, double t, int n) {
  switch (spec.model) {
    case DigitalModel::M1: return spec.delta * t / n;
    case DigitalModel::M2: return spec.delta;
    default: return spec.delta * std::sqrt(t / n);
  }
}

PerturbationSource random_source(const TruncatedHamiltonian& trunc, Ensemble ensemble, Rng& rng) {
  return [&trunc, ensemble, &rng](int, int, std::size_t k) {
    return sample_perturbation(ensemble, static_cast<int>(trunc.term(k).support.size()), rng);
  };
}

PerturbationSource fixed_source(std::vector<Mat> per_term) {
  return [L = std::move(per_term)](int, int, std::size_t k) { return L.at(k); };
}

Mat perturbed_product_unitary(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t,
                              const DigitalNoiseSpec& spec, NoiseRealization& realization) {
  Rng rng = make_rng(realization.master_seed, realization.trial_index, Stream::kGates);
  return perturbed_product_unitary(plan, trunc, t, spec, random_source(trunc, spec.ensemble, rng), &realization);
}

Mat perturbed_product_unitary(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t,
                              const DigitalNoiseSpec& spec, const PerturbationSource& source, NoiseRealization* diag) {
  Mat U = Mat::Identity(trunc.dim(), trunc.dim());
  noisy_product(plan, trunc, t, spec, source, U, diag);
  return U;
}

Vec perturbed_product_state(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t,
                            const DigitalNoiseSpec& spec, NoiseRealization& realization, const Vec& psi0) {
  Rng rng = make_rng(realization.master_seed, realization.trial_index, Stream::kGates);
  return perturbed_product_state(plan, trunc, t, spec, random_source(trunc, spec.ensemble, rng), psi0, &realization);
}

Vec perturbed_product_state(const TrotterPlan& plan, const TruncatedHamiltonian& trunc, double t,
                            const DigitalNoiseSpec& spec, const PerturbationSource& source, const Vec& psi0,
                            NoiseRealization* diag) {
  Vec psi = psi0;
  noisy_product(plan, trunc, t, spec, source, psi, diag);
  return psi;
}

Directions make_noise_directions(const TruncatedHamiltonian& trunc, int m, Ensemble ensemble, Rng& rng) {
  if (m < 1) throw DomainError("noise directions: m must be >= 1");
  Directions X(trunc.n_terms());
  for (std::size_t k = 0; k < trunc.n_terms(); ++k)
    for (int a = 0; a < m; ++a)
      X[k].push_back(sample_perturbation(ensemble, static_cast<int>(trunc.term(k).support.size()), rng));
  return X;
}

std::vector<LocalOperator> direction_channels(const TruncatedHamiltonian& trunc, const Directions& X) {
  if (X.size() != trunc.n_terms()) throw DomainError("directions: one list per retained term required");
  std::vector<LocalOperator> out;
  for (std::size_t k = 0; k < X.size(); ++k)
    for (const auto& x : X[k]) out.push_back({trunc.term(k).support, x});
  return out;
}

int GaussianProcessSpec::channels() const {
  int c = 0;
  for (const auto& x : X_ops) c += static_cast<int>(x.size());
  return c;
}

double default_grid_dt(double lambda) {
  const double per_unit = 1.0 / 64.0;
  if (!std::isfinite(lambda)) return per_unit;
  return std::min(per_unit, lambda / 8.0);
}

int default_n_grid(double lambda, double t_final, double grid_dt) {
  if (grid_dt <= 0.0) grid_dt = default_grid_dt(lambda);
  return std::max(2, static_cast<int>(std::ceil(t_final / grid_dt - 1e-9)) + 1);
}

double GaussianPaths::value(int channel, double s) const {
  if (channel < 0 || channel >= values.rows()) throw DomainError("gaussian paths: channel out of range");
  if (constant || values.cols() == 1) return values(channel, 0);
  const double t0 = times.front();
  const double h = times[1] - times[0];
  double x = (s - t0) / h;
  const Eigen::Index last = values.cols() - 1;
  if (x <= 0.0) return values(channel, 0);
  if (x >= static_cast<double>(last)) return values(channel, last);
  const Eigen::Index i = static_cast<Eigen::Index>(std::floor(x));
  const double f = x - static_cast<double>(i);
  return (1.0 - f) * values(channel, i) + f * values(channel, i + 1);
}

GaussianPathSampler::GaussianPathSampler(double lambda, double t_final, int n_grid) : lambda_(lambda) {
  if (n_grid < 2) throw DomainError("gaussian paths: n_grid must be >= 2");
  if (!(t_final > 0.0)) throw DomainError("gaussian paths: t_final must be > 0");
  if (!(lambda > 0.0)) throw DomainError("gaussian paths: lambda must be > 0");
  times_.resize(n_grid);
  for (int i = 0; i < n_grid; ++i) times_[i] = t_final * i / (n_grid - 1);
  if (!std::isfinite(lambda)) return;
  Eigen::MatrixXd K(n_grid, n_grid);
  for (int i = 0; i < n_grid; ++i)
    for (int j = 0; j < n_grid; ++j) {
      const double dt = times_[i] - times_[j];
      K(i, j) = std::exp(-dt * dt / (2.0 * lambda * lambda));
    }
  K.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw NumericalError("gaussian paths: covariance not positive definite after jitter (grid too fine for lambda)");
  chol_ = llt.matrixL();
}

GaussianPaths GaussianPathSampler::sample(int channels, Rng& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  GaussianPaths p;
  p.times = times_;
  if (!std::isfinite(lambda_)) {
    p.constant = true;
    p.values.resize(channels, 1);
    for (int c = 0; c < channels; ++c) p.values(c, 0) = gauss(rng);
    return p;
  }
  const Eigen::Index n = static_cast<Eigen::Index>(times_.size());
  Eigen::MatrixXd Z(n, channels);
  for (int c = 0; c < channels; ++c)
    for (Eigen::Index i = 0; i < n; ++i) Z(i, c) = gauss(rng);
  p.values = (chol_ * Z).transpose();
  return p;
}

GaussianPaths sample_gaussian_paths(const GaussianProcessSpec& spec, double t_final, int n_grid, Rng& rng) {
  return GaussianPathSampler(spec.lambda, t_final, n_grid).sample(spec.channels(), rng);
}

AnalogEvolution evolve_analog(const TruncatedHamiltonian& trunc, const GaussianProcessSpec& spec,
                              const GaussianPaths& paths, double delta, double t, double tol) {
  if (!(tol > 0.0)) throw DomainError("evolve_analog: tol must be > 0");
  const Mat H0 = assemble_dense(trunc);
  const std::vector<Mat> X = dense_channels(trunc, direction_channels(trunc, spec.X_ops));
  if (static_cast<Eigen::Index>(X.size()) != paths.values.rows())
    throw DomainError("evolve_analog: path count differs from channel count");
  AnalogEvolution out;
  if (delta == 0.0 || paths.constant) {
    out.unitary = expm_i_hermitian(hamiltonian_at(H0, X, paths, delta, 0.0), t);
    return out;
  }
  const double h0 = paths.times.size() > 1 ? paths.times[1] - paths.times[0] : t;
  int steps = std::max(1, static_cast<int>(std::ceil(t / h0 - 1e-9)));
  Mat prev = midpoint_propagator(H0, X, paths, delta, t, steps);
  for (int halving = 0; halving < 12; ++halving) {
    steps *= 2;
    Mat next = midpoint_propagator(H0, X, paths, delta, t, steps);
    const double change = operator_norm(next - prev);
    prev = std::move(next);
    if (change < tol) {
      out.unitary = std::move(prev);
      out.steps = steps;
      out.last_change = change;
      return out;
    }
  }
  throw NumericalError("evolve_analog: no convergence after 12 step halvings");
}

Mat evolve_analog_static(const TruncatedHamiltonian& trunc, const std::vector<Mat>& L, double delta, double t) {
  return expm_i_hermitian(assemble_dense(trunc) + delta * embed_term_sum(trunc, L), t);
}

std::vector<Vec> evolve_analog_states(const TruncatedHamiltonian& trunc, const GaussianProcessSpec& spec,
                                      const GaussianPaths& paths, double delta, const std::vector<double>& times,
                                      double step, const Vec& psi0) {
  if (!(step > 0.0)) throw DomainError("evolve_analog_states: step must be > 0");
  const Mat H0 = assemble_dense(trunc);
  const std::vector<Mat> X = dense_channels(trunc, direction_channels(trunc, spec.X_ops));
  std::vector<Vec> out;
  if (delta == 0.0 || paths.constant) {
    const EigHermitian e = eig_hermitian(hamiltonian_at(H0, X, paths, delta, 0.0));
    for (double t : times) out.push_back(propagator(e, t) * psi0);
    return out;
  }
  Vec psi = psi0;
  long done = 0;
  for (double t : times) {
    const long target = std::lround(t / step);
    if (target < done) throw DomainError("evolve_analog_states: times must be ascending");
    for (; done < target; ++done) {
      const Mat H = hamiltonian_at(H0, X, paths, delta, (done + 0.5) * step);
      psi = expm_i_hermitian(H, step) * psi;
    }
    out.push_back(psi);
  }
  return out;
}

double default_white_dt(double delta) {
  if (delta == 0.0) return 0.01;
  return std::min(0.01, 0.001 / (delta * delta));
}

WhiteNoiseIntegrator::WhiteNoiseIntegrator(const TruncatedHamiltonian& trunc, std::vector<LocalOperator> channels,
                                           double delta, double dt)
    : n_qubits_(trunc.n_qubits()), delta_(delta), dt_(dt), channels_(std::move(channels)) {
  if (!(dt > 0.0)) throw DomainError("white noise: dt must be > 0");
  if (delta < 0.0) throw DomainError("white noise: delta must be >= 0");
  Mat A = -kI * assemble_dense(trunc);
  for (const auto& c : channels_) {
    if (!is_hermitian(c.matrix)) throw DomainError("white noise: channel operator is not Hermitian");
    positions_.push_back(trunc.positions_of(c.support));
    const Mat x2 = c.matrix * c.matrix;
    A -= (0.5 * delta * delta) * embed(x2, positions_.back(), n_qubits_);
  }
  drift_ = expm_general(dt * A);
}

Eigen::MatrixXd WhiteNoiseIntegrator::increments(int steps, Rng& rng) const {
  std::normal_distribution<double> gauss(0.0, std::sqrt(dt_));
  Eigen::MatrixXd dW(channels(), steps);
  for (int s = 0; s < steps; ++s)
    for (int c = 0; c < channels(); ++c) dW(c, s) = gauss(rng);
  return dW;
}

Vec WhiteNoiseIntegrator::evolve(const Vec& psi0, const Eigen::MatrixXd& dW, NoiseRealization* diag) const {
  return evolve_series(psi0, dW, {static_cast<int>(dW.cols())}, diag).back();
}

std::vector<Vec> WhiteNoiseIntegrator::evolve_series(const Vec& psi0, const Eigen::MatrixXd& dW,
                                                     const std::vector<int>& checkpoints,
                                                     NoiseRealization* diag) const {
  if (dW.rows() != channels()) throw DomainError("white noise: increment rows differ from channel count");
  std::vector<Vec> out;
  Vec psi = psi0;
  Vec phi, tmp;
  int done = 0;
  for (int target : checkpoints) {
    if (target < done || target > dW.cols()) throw DomainError("white noise: bad checkpoint");
    for (; done < target; ++done) {
      phi = psi;
      if (delta_ != 0.0) {
        for (int c = 0; c < channels(); ++c) {
          tmp = psi;
          apply_local(channels_[c].matrix, positions_[c], n_qubits_, tmp);
          phi -= (kI * delta_ * dW(c, done)) * tmp;
        }
      }
      psi.noalias() = drift_ * phi;
    }
    if (diag) {
      const double drift = std::abs(psi.norm() - 1.0);
      diag->max_norm_drift = std::max(diag->max_norm_drift, drift);
      if (psi.norm() < 0.5 || psi.norm() > 1.5) diag->norm_warning = true;
    }
    out.push_back(psi);
  }
  return out;
}

Eigen::MatrixXd coarsen_increments(const Eigen::MatrixXd& fine, int factor) {
  if (factor < 1 || fine.cols() % factor != 0) throw DomainError("coarsen_increments: factor must divide step count");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(fine.rows(), fine.cols() / factor);
  for (Eigen::Index s = 0; s < fine.cols(); ++s) out.col(s / factor) += fine.col(s);
  return out;
}

Vec evolve_white_noise(const TruncatedHamiltonian& trunc, const Directions& X, double delta, double t, double dt,
                       const Vec& psi0, NoiseRealization& realization) {
  const int steps = std::max(1, static_cast<int>(std::lround(t / dt)));
  WhiteNoiseIntegrator integ(trunc, direction_channels(trunc, X), delta, t / steps);
  Rng rng = make_rng(realization.master_seed, realization.trial_index, Stream::kWiener);
  return integ.evolve(psi0, integ.increments(steps, rng), &realization);
}

Mat lindblad_superoperator(const TruncatedHamiltonian& trunc, const LindbladSpec& spec) {
  const Mat H = assemble_dense(trunc);
  const Eigen::Index D = H.rows();
  const Mat I = Mat::Identity(D, D);
  Mat S = -kI * (Eigen::kroneckerProduct(I, H).eval() - Eigen::kroneckerProduct(H.transpose(), I).eval());
  const double g = spec.delta * spec.delta;
  for (const auto& j : spec.jumps) {
    if (!is_hermitian(j.matrix)) throw DomainError("lindblad: jump operator is not Hermitian");
    if (operator_norm(j.matrix) > 1.0 + 1e-12) throw DomainError("lindblad: jump operator norm exceeds 1");
    const Mat L = extend(j, trunc.region());
    const Mat L2 = L * L;
    S += g * (Eigen::kroneckerProduct(L.transpose(), L).eval() - 0.5 * Eigen::kroneckerProduct(I, L2).eval() -
              0.5 * Eigen::kroneckerProduct(L2.transpose(), I).eval());
  }
  return S;
}

Mat lindblad_propagate(const TruncatedHamiltonian& trunc, const LindbladSpec& spec, const Mat& rho0, double t) {
  if (trunc.dim() > 64) throw CapacityError("lindblad_propagate: direct mode needs dim <= 64");
  const Eigen::Index D = static_cast<Eigen::Index>(trunc.dim());
  if (rho0.rows() != D || rho0.cols() != D) throw DomainError("lindblad_propagate: rho0 dimension mismatch");
  const Mat P = expm_general(t * lindblad_superoperator(trunc, spec));
  const Vec v = P * Eigen::Map<const Vec>(rho0.data(), D * D);
  Mat rho = Eigen::Map<const Mat>(v.data(), D, D);
  rho = (0.5 * (rho + rho.adjoint())).eval();
  if (std::abs(rho.trace() - rho0.trace()) > 1e-9) throw NumericalError("lindblad_propagate: trace not preserved");
  return rho;
}

Mat lindblad_trajectories(const TruncatedHamiltonian& trunc, const LindbladSpec& spec, const Vec& psi0, double t,
                          double dt, int trials, std::uint64_t master_seed) {
  if (trials < 1) throw DomainError("lindblad_trajectories: trials must be >= 1");
  const int steps = std::max(1, static_cast<int>(std::lround(t / dt)));
  WhiteNoiseIntegrator integ(trunc, spec.jumps, spec.delta, t / steps);
  Mat rho = Mat::Zero(trunc.dim(), trunc.dim());
  for (int k = 0; k < trials; ++k) {
    Rng rng = make_rng(master_seed, static_cast<std::uint64_t>(k), Stream::kWiener);
    const Vec psi = integ.evolve(psi0, integ.increments(steps, rng));
    rho += psi * psi.adjoint();
  }
  return rho / static_cast<double>(trials);
}

LindbladSpec brownian_limit_spec(const TruncatedHamiltonian& trunc, const TrotterPlan& plan, double delta) {
  LindbladSpec spec;
  spec.delta = delta * std::sqrt(static_cast<double>(plan.upsilon()));
  for (std::size_t k = 0; k < trunc.n_terms(); ++k) {
    const Region& supp = trunc.term(k).support;
    const int q = static_cast<int>(supp.size());
    const std::uint64_t count = (std::uint64_t{1} << (2 * q)) - 1;
    const double w = 1.0 / std::sqrt(static_cast<double>(count));
    for (std::uint64_t code = 1; code <= count; ++code) {
      std::string ops(q, 'I');
      std::uint64_t c = code;
      for (int i = q - 1; i >= 0; --i) {
        ops[i] = "IXYZ"[c & 3];
        c >>= 2;
      }
      spec.jumps.push_back({supp, w * pauli_string(ops)});
    }
  }
  return spec;
}

}  // namespace stabsim
