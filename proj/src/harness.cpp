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

#include "stabsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/beta.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "stabsim/error.hpp"
#include "stabsim/noise.hpp"
#include "stabsim/trotter.hpp"

namespace stabsim {

namespace fs = std::filesystem;

namespace {

bool is_digital(const std::string& m) { return m == "none" || m == "M1" || m == "M2" || m == "discrete_ito"; }

// Product state on a region; neel puts |1> on sites with odd coordinate sum.
Vec region_state(const std::string& kind, const Region& region) {
  const double r = 1.0 / std::sqrt(2.0);
  Vec psi = Vec::Ones(1);
  for (const Site& s : region.sites()) {
    Vec q(2);
    if (kind == "zero") {
      q << 1.0, 0.0;
    } else if (kind == "plus") {
      q << r, r;
    } else if (kind == "y") {
      q << r, cplx(0.0, r);
    } else if (kind == "neel") {
      const int parity = std::accumulate(s.begin(), s.end(), 0) & 1;
      q << (parity ? 0.0 : 1.0), (parity ? 1.0 : 0.0);
    } else {
      throw ConfigError("unknown initial state '" + kind + "'");
    }
    psi = Eigen::kroneckerProduct(psi, q).eval();
  }
  return psi;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ' ');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

class PointContext {
 public:
  PointContext(const ExperimentConfig& cfg, const LocalHamiltonian& ham, const Observable& obs, const GridPoint& pt)
      : pt(pt), trunc(ham, obs, pt.l), plan(suzuki_plan(pt.p, pt.n)) {
    O = embed_observable(obs, trunc);
    psi0 = region_state(cfg.initial_state, trunc.region());
    const EigHermitian eig = eig_hermitian(assemble_dense(trunc));
    if (cfg.worst_case) U_exact = propagator(eig, pt.t);
    psi_exact = propagator(eig, pt.t) * psi0;

    if (cfg.include_truncation) {
      // Reference on a region that covers the whole lattice.
      ref.emplace(ham, obs, ham.lattice().diameter() + 1);
      const EigHermitian e = eig_hermitian(assemble_dense(*ref));
      const Mat U = propagator(e, pt.t);
      const Mat O_ref = embed_observable(obs, *ref);
      ref_value = expectation(O_ref, Vec(U * region_state(cfg.initial_state, ref->region())));
      if (cfg.worst_case) heisenberg_ref = U.adjoint() * O_ref * U;
    } else {
      ref_value = expectation(O, psi_exact);
    }

    BoundParams bp;
    const LocalityConstants& c = trunc.constants();
    bp.d = c.d;
    bp.R = c.R;
    bp.R_O = c.R_O;
    bp.norm_O = obs.norm;
    bp.supp_O_size = static_cast<int>(obs.support.size());
    bp.p = pt.p;
    bp.n = pt.n;
    bp.t = pt.t;
    bp.delta = pt.delta;
    bp.lambda = pt.lambda;
    bp.m = cfg.noise.m;
    bp.theta_count = static_cast<double>(trunc.n_terms());
    if (cfg.include_truncation) bp.l = pt.l;
    params = bp;
    for (const auto& name : cfg.theorems) {
      BoundReport r = eval_bound(parse_theorem(name), bp);
      if (r.theorem == TheoremId::Trotter) {
        // Observable form of the unitary bound.
        r.terms["unitary"] = r.rhs;
        r.rhs *= 2.0 * obs.norm;
        if (bp.l) {
          r.terms["truncation"] = eval_bound(TheoremId::Truncation, bp).rhs;
          r.rhs += r.terms["truncation"];
        }
      }
      for (const auto& [k, ok] : r.assumptions)
        if (!ok) flags.push_back("!" + k);
      bounds.push_back(std::move(r));
    }
    std::sort(flags.begin(), flags.end());
    flags.erase(std::unique(flags.begin(), flags.end()), flags.end());
  }

  GridPoint pt;
  TruncatedHamiltonian trunc;
  TrotterPlan plan;
  Mat O;
  Vec psi0;
  Vec psi_exact;
  Mat U_exact;
  std::optional<TruncatedHamiltonian> ref;
  double ref_value = 0.0;
  Mat heisenberg_ref;
  BoundParams params;
  std::vector<BoundReport> bounds;
  std::vector<std::string> flags;
};

TrialRunner::TrialRunner(ExperimentConfig config)
    : config_(std::move(config)),
      ham_(make_hamiltonian(config_.model)),
      obs_(make_observable(config_.observable)),
      points_(grid_points(config_)) {}

TrialRunner::~TrialRunner() = default;

const PointContext& TrialRunner::context(int point) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(point);
  if (it == cache_.end())
    it = cache_.emplace(point, std::make_unique<PointContext>(config_, ham_, obs_, points_.at(point))).first;
  return *it->second;
}

std::vector<BoundReport> TrialRunner::bounds(int point) const { return context(point).bounds; }

TrialRecord TrialRunner::run(int point, int trial) const {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.point = point;
  rec.trial = trial;
  try {
    const PointContext& ctx = context(point);
    rec.flags = ctx.flags;
    const ExperimentConfig& cfg = config_;
    const GridPoint& pt = ctx.pt;
    const TruncatedHamiltonian& trunc = ctx.trunc;
    const std::string& model = cfg.noise.model;
    const Ensemble ens = parse_ensemble(cfg.noise.ensemble);
    NoiseRealization realization;
    realization.master_seed = cfg.master_seed;
    realization.trial_index = static_cast<std::uint64_t>(trial);

    std::optional<Vec> psi;
    std::optional<Mat> V;
    std::optional<Mat> rho;

    if (is_digital(model)) {
      if (model == "none") {
        if (cfg.worst_case) {
          V = product_unitary(ctx.plan, trunc, pt.t);
        } else {
          psi = product_state(ctx.plan, trunc, pt.t, ctx.psi0);
        }
      } else {
        const DigitalNoiseSpec spec{parse_digital_model(model), pt.delta, ens};
        if (cfg.worst_case) {
          V = perturbed_product_unitary(ctx.plan, trunc, pt.t, spec, realization);
        } else {
          psi = perturbed_product_state(ctx.plan, trunc, pt.t, spec, realization, ctx.psi0);
        }
      }
    } else if (model == "analog_static") {
      Rng rng = make_rng(cfg.master_seed, static_cast<std::uint64_t>(trial), Stream::kStatic);
      std::vector<Mat> L;
      for (std::size_t k = 0; k < trunc.n_terms(); ++k)
        L.push_back(sample_perturbation(ens, static_cast<int>(trunc.term(k).support.size()), rng));
      V = evolve_analog_static(trunc, L, pt.delta, pt.t);
    } else {
      Rng dir_rng = make_rng(cfg.master_seed, static_cast<std::uint64_t>(trial), Stream::kDirections);
      const Directions X = make_noise_directions(trunc, cfg.noise.m, ens, dir_rng);
      if (model == "analog_gaussian") {
        GaussianProcessSpec spec;
        spec.m = cfg.noise.m;
        spec.lambda = pt.lambda;
        spec.grid_dt = cfg.noise.dt.value_or(0.0);
        spec.X_ops = X;
        const int n_grid = cfg.noise.n_grid.value_or(default_n_grid(pt.lambda, pt.t, spec.grid_dt));
        Rng path_rng = make_rng(cfg.master_seed, static_cast<std::uint64_t>(trial), Stream::kPaths);
        const GaussianPaths paths = sample_gaussian_paths(spec, pt.t, n_grid, path_rng);
        AnalogEvolution evo = evolve_analog(trunc, spec, paths, pt.delta, pt.t, cfg.noise.tol);
        if (evo.last_change > cfg.noise.tol) rec.flags.push_back("analog_not_converged");
        V = std::move(evo.unitary);
      } else if (model == "white_noise") {
        const double dt = cfg.noise.dt.value_or(default_white_dt(pt.delta));
        psi = evolve_white_noise(trunc, X, pt.delta, pt.t, dt, ctx.psi0, realization);
        if (realization.norm_warning) rec.flags.push_back("norm_warning");
      } else if (model == "lindblad") {
        const LindbladSpec spec{direction_channels(trunc, X), pt.delta};
        if (trunc.dim() <= 64) {
          rho = lindblad_propagate(trunc, spec, Mat(ctx.psi0 * ctx.psi0.adjoint()), pt.t);
        } else {
          // superoperator too large; average white-noise paths seeded per trial
          const double dt = cfg.noise.dt.value_or(default_white_dt(pt.delta));
          const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial), Stream::kWiener);
          Mat avg = lindblad_trajectories(trunc, spec, ctx.psi0, pt.t, dt, cfg.noise.trajectories, seed);
          rho = Mat(avg / avg.trace().real());
          rec.flags.push_back("lindblad_trajectories");
        }
      } else {
        throw ConfigError("unknown noise model '" + model + "'");
      }
    }

    if (V) psi = *V * ctx.psi0;
    const double value = rho ? expectation(ctx.O, *rho) : expectation(ctx.O, *psi);
    rec.sample.delta_rho = std::abs(value - ctx.ref_value);
    if (psi && !ctx.ref) rec.sample.hs_distance = hs_distance(ctx.psi_exact, *psi);
    if (V && cfg.worst_case) {
      if (ctx.ref) {
        const Mat local = V->adjoint() * ctx.O * *V;
        const Mat big = extend(LocalOperator{trunc.region(), local}, ctx.ref->region());
        rec.sample.delta_wc = operator_norm(Mat(0.5 * ((ctx.heisenberg_ref - big) + (ctx.heisenberg_ref - big).adjoint())));
      } else {
        rec.sample.delta_wc = delta_worst(ctx.O, ctx.U_exact, *V);
      }
    }
  } catch (const CapacityError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.sample.delta_rho = std::nan("");
    rec.flags.push_back("error");
  }
  rec.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

TrialRecord run_trial(const ExperimentConfig& config, const GridPoint& point, int trial_index) {
  ExperimentConfig one = config;
  one.grid.t = {point.t};
  one.grid.delta = {point.delta};
  one.grid.n = {point.n};
  one.grid.l = {point.l};
  one.grid.p = {point.p};
  one.grid.lambda = {point.lambda};
  TrialRunner runner(one);
  TrialRecord r = runner.run(0, trial_index);
  r.point = point.index;
  return r;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  std::vector<double> v;
  for (double x : values) {
    if (std::isnan(x)) {
      ++s.failed;
    } else {
      v.push_back(x);
    }
  }
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
  s.stderr_mean = s.std / std::sqrt(static_cast<double>(v.size()));
  s.max = v.back();
  const auto q = [&](double p) {
    const double h = p * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
  };
  s.quantiles = {{"q50", q(0.5)}, {"q90", q(0.9)}, {"q99", q(0.99)}};
  return s;
}

int thread_count_from_env() {
  if (const char* env = std::getenv("STABSIM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string manifest_hash(const ExperimentConfig& config) {
  // FNV-1a over the canonical form.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_string(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

Json record_to_json(const TrialRecord& r) {
  Json j;
  j["point"] = r.point;
  j["trial"] = r.trial;
  j["delta_rho"] = std::isnan(r.sample.delta_rho) ? Json(nullptr) : Json(r.sample.delta_rho);
  j["delta_wc"] = r.sample.delta_wc ? Json(*r.sample.delta_wc) : Json(nullptr);
  j["hs_distance"] = r.sample.hs_distance ? Json(*r.sample.hs_distance) : Json(nullptr);
  j["runtime_ms"] = r.runtime_ms;
  j["flags"] = r.flags;
  j["error"] = r.error ? Json(*r.error) : Json(nullptr);
  return j;
}

TrialRecord record_from_json(const Json& j) {
  TrialRecord r;
  r.point = j.at("point").get<int>();
  r.trial = j.at("trial").get<int>();
  r.sample.delta_rho = j.at("delta_rho").is_null() ? std::nan("") : j.at("delta_rho").get<double>();
  if (!j.at("delta_wc").is_null()) r.sample.delta_wc = j.at("delta_wc").get<double>();
  if (!j.at("hs_distance").is_null()) r.sample.hs_distance = j.at("hs_distance").get<double>();
  r.runtime_ms = j.at("runtime_ms").get<double>();
  r.flags = j.at("flags").get<std::vector<std::string>>();
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

DtCheck white_noise_dt_check(const ExperimentConfig& config, const GridPoint& point, int paths) {
  if (paths < 1) throw DomainError("white_noise_dt_check: paths must be >= 1");
  const PointContext ctx(config, make_hamiltonian(config.model), make_observable(config.observable), point);
  const TruncatedHamiltonian& trunc = ctx.trunc;
  DtCheck out;
  out.dt = config.noise.dt.value_or(default_white_dt(point.delta));
  out.paths = paths;
  const int steps = std::max(1, static_cast<int>(std::lround(point.t / out.dt)));
  const Ensemble ens = parse_ensemble(config.noise.ensemble);
  double coarse = 0.0, fine = 0.0;
  for (int k = 0; k < paths; ++k) {
    Rng dir_rng = make_rng(config.master_seed, static_cast<std::uint64_t>(k), Stream::kDirections);
    const auto channels = direction_channels(trunc, make_noise_directions(trunc, config.noise.m, ens, dir_rng));
    const WhiteNoiseIntegrator big(trunc, channels, point.delta, point.t / steps);
    const WhiteNoiseIntegrator small(trunc, channels, point.delta, point.t / (2 * steps));
    Rng w = make_rng(config.master_seed, static_cast<std::uint64_t>(k), Stream::kWiener);
    const Eigen::MatrixXd dW = small.increments(2 * steps, w);
    fine += std::abs(expectation(ctx.O, small.evolve(ctx.psi0, dW)) - ctx.ref_value);
    coarse += std::abs(expectation(ctx.O, big.evolve(ctx.psi0, coarsen_increments(dW, 2))) - ctx.ref_value);
  }
  out.mean_coarse = coarse / paths;
  out.mean_fine = fine / paths;
  const double diff = std::abs(out.mean_fine - out.mean_coarse);
  out.relative_change = out.mean_fine > 0.0 ? diff / out.mean_fine : 0.0;
  out.converged = out.relative_change <= 0.02 || diff <= 1e-12;
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  validate(config);
  TrialRunner runner(config);
  const auto& pts = runner.points();
  const int trials = config.trials;
  std::vector<std::optional<DtCheck>> dt_checks(pts.size());
  if (config.noise.model == "white_noise")
    for (std::size_t p = 0; p < pts.size(); ++p) dt_checks[p] = white_noise_dt_check(config, pts[p], std::min(trials, 100));
  const std::size_t total = pts.size() * static_cast<std::size_t>(trials);
  std::vector<std::optional<TrialRecord>> slots(total);

  std::ofstream jsonl;
  const bool persist = !options.output_dir.empty();
  if (persist) {
    fs::create_directories(options.output_dir);
    const fs::path manifest = fs::path(options.output_dir) / "manifest.json";
    const fs::path records = fs::path(options.output_dir) / "results.jsonl";
    const std::string hash = manifest_hash(config);
    bool resumed = false;
    if (options.resume && fs::exists(manifest) && fs::exists(records)) {
      std::ifstream mf(manifest);
      Json m = Json::parse(mf, nullptr, false);
      if (!m.is_discarded() && m.value("hash", "") == hash) {
        std::ifstream in(records);
        std::string line;
        while (std::getline(in, line)) {
          const Json j = Json::parse(line, nullptr, false);
          if (j.is_discarded()) continue;  // torn final line
          TrialRecord r = record_from_json(j);
          if (r.point < 0 || r.point >= static_cast<int>(pts.size()) || r.trial < 0 || r.trial >= trials) continue;
          slots[static_cast<std::size_t>(r.point) * trials + r.trial] = std::move(r);
        }
        resumed = true;
      }
    }
    if (!resumed) {
      std::ofstream mf(manifest);
      mf << Json{{"hash", hash}, {"points", pts.size()}, {"trials", trials}, {"config", config_to_json(config)}}.dump(2)
         << "\n";
      std::ofstream(records, std::ios::trunc).close();
    }
    jsonl.open(records, std::ios::app);
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < total; ++i)
    if (!slots[i]) order.push_back(i);
  if (options.shuffle) {
    Rng rng(options.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  const auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= order.size()) return;
      const std::size_t slot = order[k];
      try {
        TrialRecord rec = runner.run(static_cast<int>(slot / trials), static_cast<int>(slot % trials));
        std::lock_guard<std::mutex> lock(io_mutex);
        if (persist) jsonl << record_to_json(rec).dump() << "\n" << std::flush;
        slots[slot] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (!fatal) fatal = std::current_exception();
        next = order.size();
        return;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads > 0 ? options.threads : thread_count_from_env(),
                                                static_cast<int>(std::max<std::size_t>(order.size(), 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  SweepResult result;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    PointResult pr;
    pr.point = pts[p];
    std::vector<double> values;
    for (int tr = 0; tr < trials; ++tr) {
      TrialRecord& r = *slots[p * trials + tr];
      values.push_back(r.sample.delta_rho);
      pr.runtime_ms += r.runtime_ms;
      pr.trials.push_back(std::move(r));
    }
    pr.summary = summarize(values);
    pr.bounds = runner.bounds(static_cast<int>(p));
    pr.dt_check = dt_checks[p];
    result.points.push_back(std::move(pr));
  }

  if (persist) {
    write_csv(config, result, (fs::path(options.output_dir) / "results.csv").string());
    std::ofstream sj(fs::path(options.output_dir) / "summary.json");
    sj << summary_json(config, result).dump(2) << "\n";
  }
  return result;
}

void write_csv(const ExperimentConfig& config, const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "model,d,p,n,l,t,delta,lambda,seed,trial,delta_rho,delta_wc,hs_distance,bound_rhs,flags,runtime_ms\n";
  const std::string model = config.model.model + ":" + config.noise.model;
  for (const auto& pr : result.points) {
    const GridPoint& g = pr.point;
    const std::string rhs = pr.bounds.empty() ? "" : format_double(pr.bounds.front().rhs);
    for (const auto& r : pr.trials) {
      std::string flags;
      for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + sanitize(f);
      if (r.error) flags += (flags.empty() ? "" : ";") + std::string("error=") + sanitize(*r.error);
      out << model << ',' << config.model.d << ',' << g.p << ',' << g.n << ',' << g.l << ',' << format_double(g.t)
          << ',' << format_double(g.delta) << ',' << format_double(g.lambda) << ',' << config.master_seed << ','
          << r.trial << ',' << format_double(r.sample.delta_rho) << ','
          << (r.sample.delta_wc ? format_double(*r.sample.delta_wc) : "") << ','
          << (r.sample.hs_distance ? format_double(*r.sample.hs_distance) : "") << ',' << rhs << ',' << flags << ','
          << (config.timing ? format_double(r.runtime_ms) : "0") << '\n';
    }
  }
}

Json summary_json(const ExperimentConfig& config, const SweepResult& result) {
  Json pts = Json::array();
  for (const auto& pr : result.points) {
    const GridPoint& g = pr.point;
    Json b = Json::array();
    for (const auto& r : pr.bounds) b.push_back(to_json(r));
    std::vector<double> wc;
    for (const auto& r : pr.trials)
      if (r.sample.delta_wc) wc.push_back(*r.sample.delta_wc);
    Json point = {{"index", g.index},
                  {"t", g.t},
                  {"delta", g.delta},
                  {"n", g.n},
                  {"l", g.l},
                  {"p", g.p},
                  {"lambda", std::isfinite(g.lambda) ? Json(g.lambda) : Json("inf")}};
    Json s = {{"count", pr.summary.count},
              {"failed", pr.summary.failed},
              {"mean", pr.summary.mean},
              {"std", pr.summary.std},
              {"stderr", pr.summary.stderr_mean},
              {"max", pr.summary.max},
              {"quantiles", pr.summary.quantiles}};
    Json entry = {{"point", point}, {"summary", s}, {"bounds", b}, {"runtime_ms", pr.runtime_ms}};
    if (!wc.empty()) entry["max_delta_wc"] = *std::max_element(wc.begin(), wc.end());
    if (pr.dt_check)
      entry["dt_check"] = {{"dt", pr.dt_check->dt},
                           {"paths", pr.dt_check->paths},
                           {"mean_coarse", pr.dt_check->mean_coarse},
                           {"mean_fine", pr.dt_check->mean_fine},
                           {"relative_change", pr.dt_check->relative_change},
                           {"converged", pr.dt_check->converged}};
    pts.push_back(std::move(entry));
  }
  return {{"config_hash", manifest_hash(config)}, {"points", pts}};
}

double CsvRow::number(const std::string& key) const {
  const auto it = fields.find(key);
  if (it == fields.end() || it->second.empty()) return std::nan("");
  if (it->second == "inf") return std::numeric_limits<double>::infinity();
  return std::stod(it->second);
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  const auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split(line);
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    CsvRow row;
    for (std::size_t i = 0; i < header.size(); ++i) row.fields[header[i]] = i < cells.size() ? cells[i] : "";
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

ScalingFit fit_window(const std::vector<double>& lx, const std::vector<double>& ly, std::size_t b) {
  const std::size_t m = lx.size() - b;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = b; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = b; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw DomainError("fit_scaling: x values must not all coincide");
  ScalingFit f;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double sse = 0.0;
  for (std::size_t i = b; i < lx.size(); ++i) {
    const double e = ly[i] - f.intercept - f.exponent * lx[i];
    sse += e * e;
  }
  f.stderr_exponent = m > 2 ? std::sqrt(sse / (m - 2) / sxx) : 0.0;
  f.r2 = syy > 1e-300 ? 1.0 - sse / syy : 1.0;
  f.window_begin = b;
  f.window_size = m;
  return f;
}

}  // namespace

ScalingFit fit_scaling(std::vector<double> x, std::vector<double> y, const std::string& axis, bool auto_window) {
  if (x.size() != y.size()) throw DomainError("fit_scaling: x and y differ in length");
  if (x.size() < 4) throw DomainError("fit_scaling: at least 4 points required");
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> lx, ly;
  for (std::size_t i : idx) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_scaling: data must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  std::size_t b = 0;
  ScalingFit f = fit_window(lx, ly, b);
  while (auto_window && f.r2 < 0.98 && lx.size() - b > 4) f = fit_window(lx, ly, ++b);
  f.axis = axis;
  return f;
}

ScalingFit fit_scaling_log_corrected(const std::vector<double>& x, const std::vector<double>& y, double q,
                                     const std::string& axis) {
  const ScalingFit plain = fit_scaling(x, y, axis);
  std::vector<double> yc(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double pred = std::exp(plain.intercept) * std::pow(x[i], plain.exponent);
    const double lg = pred < 1.0 ? std::log(1.0 / pred) : 1.0;
    yc[i] = y[i] / std::pow(std::max(lg, 1.0), q);
  }
  return fit_scaling(x, yc, axis);
}

double clopper_pearson_upper(int k, int n, double confidence) {
  if (n <= 0) throw DomainError("clopper_pearson: n must be > 0");
  if (k >= n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), confidence);
}

double clopper_pearson_lower(int k, int n, double confidence) {
  if (n <= 0) throw DomainError("clopper_pearson: n must be > 0");
  if (k <= 0) return 0.0;
  return boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1), 1.0 - confidence);
}

std::vector<TailPoint> tail_estimate(const std::vector<double>& samples, double scale,
                                     const std::vector<double>& s_values, double offset) {
  if (samples.size() < 100) throw DomainError("tail_estimate: at least 100 samples required");
  const int n = static_cast<int>(samples.size());
  std::vector<TailPoint> out;
  for (double s : s_values) {
    TailPoint tp;
    tp.s = s;
    tp.threshold = offset + s * scale;
    tp.total = n;
    tp.exceed = static_cast<int>(
        std::count_if(samples.begin(), samples.end(), [&](double v) { return v >= tp.threshold; }));
    tp.fraction = static_cast<double>(tp.exceed) / n;
    tp.upper99 = clopper_pearson_upper(tp.exceed, n, 0.99);
    tp.lower99 = clopper_pearson_lower(tp.exceed, n, 0.99);
    out.push_back(tp);
  }
  return out;
}

std::vector<Violation> audit_bounds(const SweepResult& sweep) {
  std::vector<Violation> out;
  constexpr double kSlack = 1e-9;
  for (const auto& pr : sweep.points) {
    for (const auto& b : pr.bounds) {
      std::vector<std::string> flags;
      for (const auto& [k, ok] : b.assumptions)
        if (!ok) flags.push_back("!" + k);
      const double limit = b.rhs * (1.0 + kSlack) + 1e-12;
      if (is_worst_case(b.theorem)) {
        for (const auto& r : pr.trials) {
          if (r.error) continue;
          const double v = r.sample.delta_wc.value_or(r.sample.delta_rho);
          if (v > limit) out.push_back({pr.point.index, to_string(b.theorem), r.trial, v, b.rhs, flags});
        }
      } else {
        const double v = pr.summary.mean - 2.0 * pr.summary.stderr_mean;
        if (pr.summary.count > 0 && v > limit)
          out.push_back({pr.point.index, to_string(b.theorem), -1, v, b.rhs, flags});
      }
    }
  }
  return out;
}

BoundParams bound_params(const ExperimentConfig& config, const GridPoint& point) {
  const PointContext ctx(config, make_hamiltonian(config.model), make_observable(config.observable), point);
  return ctx.params;
}

}  // namespace stabsim
