// Copyright 2026 The GAP Authors
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

#ifndef GAP_EXPERIMENT_HPP
#define GAP_EXPERIMENT_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gap/baselines.hpp"
#include "gap/conjugate.hpp"
#include "gap/error.hpp"
#include "gap/geometry.hpp"
#include "gap/mc.hpp"
#include "gap/optimizer.hpp"
#include "gap/random.hpp"
#include "gap/targets.hpp"
#include "gap/types.hpp"

/**
 * \file
 * \brief Declarative experiment configs and the runner behind the `gap run` command.
 */

namespace gap::experiment {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class Experiment { T1, LogisticRegression, MixtureNear, MixtureFar, NormalGammaOracle, Custom };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::T1: return "t1";
    case Experiment::LogisticRegression: return "logistic";
    case Experiment::MixtureNear: return "mixture-near";
    case Experiment::MixtureFar: return "mixture-far";
    case Experiment::NormalGammaOracle: return "normal-gamma-oracle";
    case Experiment::Custom: return "custom";
  }
  return "custom";
}

inline Experiment parse_experiment(const std::string& s) {
  for (auto e : {Experiment::T1, Experiment::LogisticRegression, Experiment::MixtureNear, Experiment::MixtureFar,
                 Experiment::NormalGammaOracle, Experiment::Custom}) {
    if (to_string(e) == s) return e;
  }
  fail(ErrorKind::ParseError, "unknown experiment '" + s + "'");
}

/// Target description; only the fields of the chosen kind are used.
struct TargetConfig {
  std::string kind = "t1";  ///< t1 | mixture | gaussian | logistic
  targets::MixtureSpec mixture;
  Vector gaussian_mean;
  Matrix gaussian_cov;
  // logistic
  std::string dataset_path;  ///< CSV to load; empty means generate
  std::size_t n = 100;
  Vector beta;
  double rho = 0.7;
  std::uint64_t data_seed = 2024;
  Vector prior_mean;
  Matrix prior_cov;
};

struct NormalGammaConfig {
  std::size_t instances = 50;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Custom;
  TargetConfig target;
  Vector init_mean;
  Matrix init_chol;
  /// "general" uses the (μ, vech L) route; "scalar" the one-dimensional (μ, σ) route.
  std::string route = "general";
  OptimizerConfig optimizer;
  bool laplace = false;
  std::vector<std::string> divergences;
  /// Iterations averaged for the reported stationary point.
  std::size_t tail_average = 300;
  NormalGammaConfig normal_gamma;
  std::string output_dir = "gap-out";
};

// ---------------------------------------------------------------------------------------------
// JSON helpers

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

inline Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorKind::ParseError, std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorKind::ParseError, std::string(what) + " must hold numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::ParseError, std::string(what) + " must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorKind::ParseError, std::string(what) + " rows must have equal length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (!row[static_cast<std::size_t>(k)].is_number()) {
        fail(ErrorKind::ParseError, std::string(what) + " must hold numbers");
      }
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

inline std::vector<double> doubles_from_json(const json& j, const char* what) {
  const Vector v = vector_from_json(j, what);
  return {v.data(), v.data() + v.size()};
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

inline json to_json(const OptimizerConfig& c) {
  json j;
  j["step_mu"] = c.step_mu;
  j["step_l"] = c.step_l;
  j["mc_samples"] = c.mc_samples;
  j["max_iters"] = c.max_iters;
  j["grad_tol"] = c.grad_tol;
  j["dist_tol"] = c.dist_tol;
  j["overlap_clamp"] = c.overlap_clamp;
  j["seed"] = c.seed;
  j["dist_window"] = c.dist_window;
  j["grad_patience"] = c.grad_patience;
  j["threads"] = c.threads;
  j["step_mu_per_coord"] = c.step_mu_per_coord;
  j["step_l_per_coord"] = c.step_l_per_coord;
  return j;
}

inline OptimizerConfig optimizer_from_json(const json& j, OptimizerConfig c) {
  if (!j.is_object()) fail(ErrorKind::ParseError, "optimizer must be an object");
  read_field(j, "step_mu", c.step_mu);
  read_field(j, "step_l", c.step_l);
  read_field(j, "mc_samples", c.mc_samples);
  read_field(j, "max_iters", c.max_iters);
  read_field(j, "grad_tol", c.grad_tol);
  read_field(j, "dist_tol", c.dist_tol);
  read_field(j, "overlap_clamp", c.overlap_clamp);
  read_field(j, "seed", c.seed);
  read_field(j, "dist_window", c.dist_window);
  read_field(j, "grad_patience", c.grad_patience);
  read_field(j, "threads", c.threads);
  read_field(j, "step_mu_per_coord", c.step_mu_per_coord);
  read_field(j, "step_l_per_coord", c.step_l_per_coord);
  return c;
}

inline json to_json(const TargetConfig& t) {
  json j;
  j["kind"] = t.kind;
  if (t.kind == "mixture") {
    j["weights"] = t.mixture.weights;
    j["means"] = t.mixture.means;
    j["variances"] = t.mixture.variances;
  } else if (t.kind == "gaussian") {
    j["mean"] = vector_to_json(t.gaussian_mean);
    j["cov"] = matrix_to_json(t.gaussian_cov);
  } else if (t.kind == "logistic") {
    j["dataset"] = t.dataset_path;
    j["n"] = t.n;
    j["beta"] = vector_to_json(t.beta);
    j["rho"] = t.rho;
    j["data_seed"] = t.data_seed;
    j["prior_mean"] = vector_to_json(t.prior_mean);
    j["prior_cov"] = matrix_to_json(t.prior_cov);
  }
  return j;
}

inline TargetConfig target_from_json(const json& j, TargetConfig t) {
  if (!j.is_object()) fail(ErrorKind::ParseError, "target must be an object");
  read_field(j, "kind", t.kind);
  if (t.kind == "mixture") {
    if (j.contains("weights")) t.mixture.weights = doubles_from_json(j["weights"], "weights");
    if (j.contains("means")) t.mixture.means = doubles_from_json(j["means"], "means");
    if (j.contains("variances")) t.mixture.variances = doubles_from_json(j["variances"], "variances");
  } else if (t.kind == "gaussian") {
    if (j.contains("mean")) t.gaussian_mean = vector_from_json(j["mean"], "target.mean");
    if (j.contains("cov")) t.gaussian_cov = matrix_from_json(j["cov"], "target.cov");
  } else if (t.kind == "logistic") {
    read_field(j, "dataset", t.dataset_path);
    read_field(j, "n", t.n);
    if (j.contains("beta")) t.beta = vector_from_json(j["beta"], "beta");
    read_field(j, "rho", t.rho);
    read_field(j, "data_seed", t.data_seed);
    if (j.contains("prior_mean")) t.prior_mean = vector_from_json(j["prior_mean"], "prior_mean");
    if (j.contains("prior_cov")) t.prior_cov = matrix_from_json(j["prior_cov"], "prior_cov");
  } else if (t.kind != "t1") {
    fail(ErrorKind::ParseError, "unknown target kind '" + t.kind + "'");
  }
  return t;
}

inline json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["seed"] = c.optimizer.seed;
  j["target"] = to_json(c.target);
  j["init"] = {{"mean", vector_to_json(c.init_mean)}, {"chol", matrix_to_json(c.init_chol)}};
  j["route"] = c.route;
  j["optimizer"] = to_json(c.optimizer);
  j["baselines"] = {{"laplace", c.laplace}, {"divergences", c.divergences}};
  j["tail_average"] = c.tail_average;
  j["normal_gamma"] = {{"instances", c.normal_gamma.instances}};
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig preset(Experiment e);

/// Reads a config; fields absent from `j` keep the values of the named experiment's preset.
inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::ParseError, "config must be a JSON object");
  std::string name = "custom";
  read_field(j, "experiment", name);
  ExperimentConfig c = preset(parse_experiment(name));
  if (j.contains("optimizer")) c.optimizer = optimizer_from_json(j["optimizer"], c.optimizer);
  if (j.contains("seed")) read_field(j, "seed", c.optimizer.seed);
  if (j.contains("target")) c.target = target_from_json(j["target"], c.target);
  if (j.contains("init")) {
    const json& init = j["init"];
    if (!init.is_object()) fail(ErrorKind::ParseError, "init must be an object");
    if (init.contains("mean")) c.init_mean = vector_from_json(init["mean"], "init.mean");
    if (init.contains("chol")) c.init_chol = matrix_from_json(init["chol"], "init.chol");
  }
  read_field(j, "route", c.route);
  if (j.contains("baselines")) {
    const json& b = j["baselines"];
    if (!b.is_object()) fail(ErrorKind::ParseError, "baselines must be an object");
    read_field(b, "laplace", c.laplace);
    read_field(b, "divergences", c.divergences);
  }
  read_field(j, "tail_average", c.tail_average);
  if (j.contains("normal_gamma")) {
    read_field(j["normal_gamma"], "instances", c.normal_gamma.instances);
  }
  read_field(j, "output_dir", c.output_dir);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, "config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------------------------
// Presets

inline ExperimentConfig preset(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.output_dir = "gap-out/" + to_string(e);
  switch (e) {
    case Experiment::T1:
      c.target.kind = "t1";
      c.init_mean = Vector::Constant(1, 10.0);
      c.init_chol = Matrix::Constant(1, 1, 5.0);
      c.route = "scalar";
      c.optimizer.step_mu = 0.1;
      c.optimizer.step_l = 5.0;
      c.optimizer.mc_samples = 10'000;
      c.optimizer.max_iters = 1000;
      // Run the full budget; the stopping rules would otherwise fire inside the noise floor.
      c.optimizer.grad_tol = 1e-12;
      c.optimizer.dist_tol = 1e-12;
      c.optimizer.seed = 7;
      c.divergences = {"hellinger"};
      c.laplace = true;
      break;
    case Experiment::MixtureNear:
    case Experiment::MixtureFar:
      c.target.kind = "mixture";
      if (e == Experiment::MixtureNear) {
        c.target.mixture = {{0.7, 0.3}, {0.0, 5.0}, {1.0, 1.0}};
        c.init_mean = Vector::Constant(1, 2.0);
      } else {
        c.target.mixture = {{0.9, 0.1}, {0.0, 15.0}, {1.0, 1.0}};
        c.init_mean = Vector::Constant(1, 0.0);
      }
      c.init_chol = Matrix::Constant(1, 1, 1.0);
      c.route = "scalar";
      c.optimizer.step_mu = 0.5;
      c.optimizer.step_l = 0.5;
      c.optimizer.max_iters = 1000;
      c.optimizer.grad_tol = 1e-12;
      c.optimizer.dist_tol = 1e-12;
      c.optimizer.seed = 7;
      c.laplace = true;
      c.divergences = {"hellinger", "kl", "reverse_kl"};
      break;
    case Experiment::LogisticRegression:
      c.target.kind = "logistic";
      c.target.n = 100;
      c.target.beta = Vector(3);
      c.target.beta << 0.5, -1.5, 1.0;
      c.target.rho = 0.7;
      c.target.data_seed = 2024;
      c.target.prior_mean = Vector::Zero(3);
      c.target.prior_cov = 100.0 * Matrix::Identity(3, 3);
      c.init_mean = Vector::Zero(3);
      c.init_chol = 0.3 * Matrix::Identity(3, 3);
      c.route = "general";
      c.optimizer.step_mu = 0.2;
      c.optimizer.step_l = 0.05;
      c.optimizer.max_iters = 1500;
      c.optimizer.grad_tol = 1e-12;
      c.optimizer.dist_tol = 1e-12;
      c.optimizer.seed = 7;
      c.optimizer.threads = 0;
      c.laplace = true;
      break;
    case Experiment::NormalGammaOracle:
      c.target.kind = "t1";
      c.init_mean = Vector::Zero(1);
      c.init_chol = Matrix::Identity(1, 1);
      c.normal_gamma.instances = 50;
      c.optimizer.seed = 1;
      break;
    case Experiment::Custom:
      c.target.kind = "t1";
      c.init_mean = Vector::Zero(1);
      c.init_chol = Matrix::Identity(1, 1);
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------------------------
// Runner

inline TargetDensity build_target(const TargetConfig& t) {
  if (t.kind == "t1") return targets::student_t1_target();
  if (t.kind == "mixture") return targets::mixture_target(t.mixture);
  if (t.kind == "gaussian") {
    return gaussian_target(GaussianModel::from_covariance(t.gaussian_mean, t.gaussian_cov));
  }
  if (t.kind == "logistic") {
    targets::LogisticDataset data;
    if (!t.dataset_path.empty()) {
      std::ifstream in(t.dataset_path);
      if (!in) fail(ErrorKind::ParseError, "cannot open dataset '" + t.dataset_path + "'");
      data = targets::read_logistic_csv(in, t.prior_mean, t.prior_cov);
    } else {
      data = targets::generate_logistic_data(t.n, t.beta, t.rho, t.data_seed, t.prior_mean, t.prior_cov);
    }
    return targets::logistic_posterior_target(data);
  }
  fail(ErrorKind::ParseError, "unknown target kind '" + t.kind + "'");
}

struct NormalGammaReport {
  std::size_t instances = 0;
  double max_rel_param_error = 0.0;
  double max_abs_residual = 0.0;
};

/// Random prior/data instances: argmax of log g against the closed-form posterior.
inline NormalGammaReport run_normal_gamma_oracle(const NormalGammaConfig& cfg, std::uint64_t seed) {
  using namespace conjugate;
  NormalGammaReport report;
  report.instances = cfg.instances;
  const auto stream = random::Stream::OracleInstances;
  for (std::size_t k = 0; k < cfg.instances; ++k) {
    auto u = [&](std::uint32_t block, bool second) {
      const auto pair = random::uniform_pair(seed, stream, k, block);
      return second ? pair.second : pair.first;
    };
    const NormalGammaParams prior{-5.0 + 10.0 * u(0, false), 0.1 + 4.9 * u(0, true), 0.5 + 4.5 * u(1, false),
                                  0.1 + 4.9 * u(1, true)};
    GaussianDataSummary data;
    data.n = 1 + static_cast<std::size_t>(49.0 * u(2, false));
    data.xbar = -5.0 + 10.0 * u(2, true);
    data.s = data.n > 1 ? 10.0 * static_cast<double>(data.n) * u(3, false) : 0.0;
    const NormalGammaParams exact = ng_posterior(prior, data);
    const NormalGammaParams start{exact.mu + (u(3, true) - 0.5), exact.lambda * (0.5 + u(4, false)),
                                  exact.alpha * (0.5 + u(4, true)), exact.beta * (0.5 + u(5, false))};
    const MaximizeResult fit = ng_maximize_log_g(prior, data, start);
    report.max_rel_param_error = std::max(report.max_rel_param_error, max_relative_error(fit.params, exact));
    report.max_abs_residual =
        std::max(report.max_abs_residual, ng_stationarity_residuals(prior, exact, data).cwiseAbs().maxCoeff());
  }
  return report;
}

inline json model_json(const GaussianModel& m) {
  return {{"mean", vector_to_json(m.mean())}, {"chol", matrix_to_json(m.chol())}};
}

struct RunOutcome {
  int exit_code = 0;
  std::string message;
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IOError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::IOError, "write to '" + path.string() + "' failed");
}

inline void write_trace(const std::filesystem::path& dir, const GapTrace& trace, Eigen::Index dim) {
  std::ostringstream os;
  write_trace_csv(os, trace, dim);
  write_text(dir / "trace.csv", os.str());
}

/// Distance from `m` to the target: quadrature in 1-D, Monte Carlo otherwise.
inline double distance_to_target(const GaussianModel& m, const TargetDensity& target, const ExperimentConfig& c) {
  if (m.dim() == 1 && target.normalized) {
    const ScalarGaussian g{m.mean()(0), m.chol()(0, 0)};
    return geometry::distance_to_target_1d(g, target, baselines::comparison_grid(target, g), c.optimizer.overlap_clamp);
  }
  const Matrix samples = mc::draw_samples(m, 100'000, random::splitmix64(c.optimizer.seed), c.optimizer.threads);
  const auto est = mc::estimate_all(m, target, samples, nullptr, c.optimizer.overlap_clamp, c.optimizer.threads);
  return geometry::spherical_fisher_distance(est.overlap, c.optimizer.overlap_clamp);
}

inline json fitted_json(const GaussianModel& m, const TargetDensity& target, const ExperimentConfig& c) {
  json j = model_json(m);
  j["covariance"] = matrix_to_json(m.covariance());
  j["distance_to_target"] = distance_to_target(m, target, c);
  return j;
}

inline void write_density_curves(const std::filesystem::path& dir, const TargetDensity& target,
                                 const std::vector<std::pair<std::string, ScalarGaussian>>& fits) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& [name, g] : fits) {
    lo = std::min(lo, g.mean - 6.0 * std::abs(g.sigma));
    hi = std::max(hi, g.mean + 6.0 * std::abs(g.sigma));
  }
  if (target.support) {
    lo = std::min(lo, target.support->first);
    hi = std::max(hi, target.support->second);
  }
  const auto grid = geometry::uniform_grid(lo, hi, 2001);
  std::ostringstream os;
  os << "x,target";
  for (const auto& [name, g] : fits) os << ',' << name;
  os << '\n';
  for (double x : grid) {
    os << format_double(x) << ',' << format_double(std::exp(2.0 * target.log_sqrt_1d(x)));
    for (const auto& [name, g] : fits) os << ',' << format_double(std::exp(2.0 * scalar_log_sqrt_density(g, x)));
    os << '\n';
  }
  write_text(dir / "density_curves.csv", os.str());
}

}  // namespace detail

/// Runs one experiment and writes its artifacts into config.output_dir.
/**
 * Exit codes: 0 success, 2 invalid configuration, 3 optimizer failure (the partial trace is
 * still written), 4 I/O failure.
 */
inline RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log = std::cerr) {
  const auto started = std::chrono::steady_clock::now();
  const std::filesystem::path dir(config.output_dir);
  TargetDensity target;
  GaussianModel init(Vector::Zero(1), Matrix::Identity(1, 1));
  try {
    config.optimizer.validate();
    if (config.experiment != Experiment::NormalGammaOracle) {
      target = build_target(config.target);
      init = GaussianModel(config.init_mean, config.init_chol);
      if (target.dim != init.dim()) fail(ErrorKind::DimensionMismatch, "init and target dimensions differ");
      if (config.route != "general" && config.route != "scalar") {
        fail(ErrorKind::ParseError, "route must be 'general' or 'scalar'");
      }
      if (config.route == "scalar" && init.dim() != 1) {
        fail(ErrorKind::DimensionMismatch, "the scalar route needs a one-dimensional target");
      }
      for (const auto& d : config.divergences) baselines::parse_divergence(d);
    }
  } catch (const Error& e) {
    log << "gap: invalid configuration: " << e.what() << '\n';
    return {2, e.what()};
  }

  try {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IOError, "cannot create output directory '" + dir.string() + "': " + ec.message());

    json result;
    result["schema_version"] = kSchemaVersion;
    result["experiment"] = to_string(config.experiment);
    result["seed"] = config.optimizer.seed;

    if (config.experiment == Experiment::NormalGammaOracle) {
      const NormalGammaReport report = run_normal_gamma_oracle(config.normal_gamma, config.optimizer.seed);
      result["gap"] = nullptr;
      result["baselines"] = json::object();
      result["normal_gamma"] = {{"instances", report.instances},
                                {"max_rel_param_error", report.max_rel_param_error},
                                {"max_abs_stationarity_residual", report.max_abs_residual}};
      result["max_rel_param_error"] = report.max_rel_param_error;
    } else {
      GapResult run = [&] {
        try {
          if (config.route == "scalar") {
            return gap1d_run({init.mean()(0), init.chol()(0, 0)}, target, config.optimizer);
          }
          return gap_run(init, target, config.optimizer);
        } catch (const RunFailure& f) {
          detail::write_trace(dir, f.trace(), init.dim());
          throw;
        }
      }();
      detail::write_trace(dir, run.trace, init.dim());
      const GaussianModel stationary = tail_average(run.trace, config.tail_average);

      json gap = detail::fitted_json(run.final_model, target, config);
      gap["converged"] = run.converged;
      gap["stop_reason"] = to_string(run.stop_reason);
      gap["iterations"] = run.trace.size();
      gap["tail_average"] = detail::fitted_json(stationary, target, config);
      gap["tail_average"]["iterations"] = std::min(config.tail_average, run.trace.size());
      result["gap"] = gap;

      json base = json::object();
      std::vector<std::pair<std::string, ScalarGaussian>> curves;
      if (init.dim() == 1) {
        curves.emplace_back("gap", ScalarGaussian{run.final_model.mean()(0), run.final_model.chol()(0, 0)});
        curves.emplace_back("gap_tail_average", ScalarGaussian{stationary.mean()(0), stationary.chol()(0, 0)});
      }
      if (config.laplace) {
        const GaussianModel lap = baselines::laplace_approx(target, init.mean());
        base["laplace"] = detail::fitted_json(lap, target, config);
        if (init.dim() == 1) curves.emplace_back("laplace", ScalarGaussian{lap.mean()(0), lap.chol()(0, 0)});
      }
      for (const auto& name : config.divergences) {
        if (init.dim() != 1) {
          fail(ErrorKind::InvalidArgument, "divergence baselines are one-dimensional");
        }
        const auto kind = baselines::parse_divergence(name);
        const ScalarGaussian start{init.mean()(0), std::abs(init.chol()(0, 0))};
        const auto fit = baselines::minimize_divergence_1d_detailed(target, kind, start);
        json entry = detail::fitted_json(fit.fit.to_model(), target, config);
        entry["divergence"] = fit.divergence;
        base[kind.name()] = entry;
        curves.emplace_back(kind.name(), fit.fit);
      }
      result["baselines"] = base;
      if (init.dim() == 1) detail::write_density_curves(dir, target, curves);
    }
    result["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    detail::write_text(dir / "result.json", result.dump(2) + "\n");
    return {0, ""};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::IOError) {
      log << "gap: " << e.what() << '\n';
      return {4, e.what()};
    }
    if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::InvalidSpec) {
      log << "gap: invalid configuration: " << e.what() << '\n';
      return {2, e.what()};
    }
    log << "gap: optimizer failed: " << e.what() << '\n';
    return {3, e.what()};
  }
}

}  // namespace gap::experiment

#endif
