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


#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gap/experiment.hpp"
#include "gap/gap.hpp"

namespace {

using gap::experiment::json;

gap::GaussianModel read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) gap::fail(gap::ErrorKind::ParseError, "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    gap::fail(gap::ErrorKind::ParseError, "'" + path + "': " + e.what());
  }
  if (!j.is_object() || !j.contains("mean")) {
    gap::fail(gap::ErrorKind::ParseError, "'" + path + "' needs a mean and a chol or cov field");
  }
  const gap::Vector mean = gap::experiment::vector_from_json(j["mean"], "mean");
  if (j.contains("chol")) return gap::GaussianModel(mean, gap::experiment::matrix_from_json(j["chol"], "chol"));
  if (j.contains("cov")) {
    return gap::GaussianModel::from_covariance(mean, gap::experiment::matrix_from_json(j["cov"], "cov"));
  }
  gap::fail(gap::ErrorKind::ParseError, "'" + path + "' needs a chol or cov field");
}

int run_distance(const std::string& a, const std::string& b) {
  try {
    const gap::GaussianModel ma = read_model(a);
    const gap::GaussianModel mb = read_model(b);
    if (ma.dim() != mb.dim()) gap::fail(gap::ErrorKind::DimensionMismatch, "models have different dimensions");
    const double overlap = std::min(1.0, gap::geometry::bhattacharyya_overlap_gaussians(ma, mb));
    // No clamp here: identical models must report exactly zero.
    std::printf("spherical_fisher_distance %.10g\n", std::acos(overlap));
    std::printf("hellinger %.10g\n", gap::geometry::hellinger_distance(overlap));
    return 0;
  } catch (const gap::Error& e) {
    std::cerr << "gap distance: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian approximation of posteriors by spherical Fisher distance descent"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment and write trace.csv, result.json, density_curves.csv");
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> max_iters;
  std::optional<double> step_mu;
  std::optional<double> step_l;
  std::optional<std::size_t> threads;
  std::string out;
  auto* exp_opt = run->add_option("--experiment", experiment,
                                  "preset: t1, logistic, mixture-near, mixture-far, normal-gamma-oracle, custom");
  run->add_option("--config", config_path, "JSON experiment config")->excludes(exp_opt);
  run->add_option("--seed", seed, "run seed");
  run->add_option("--samples", samples, "Monte Carlo samples per iteration");
  run->add_option("--max-iters", max_iters, "iteration budget");
  run->add_option("--step-mu", step_mu, "step size for the mean block");
  run->add_option("--step-l", step_l, "step size for the Cholesky block");
  run->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
  run->add_option("--out", out, "output directory");

  auto* dist = app.add_subcommand("distance", "distances between two Gaussian model files");
  std::string model_a;
  std::string model_b;
  dist->add_option("model_a", model_a, "JSON with mean and chol (or cov)")->required();
  dist->add_option("model_b", model_b, "JSON with mean and chol (or cov)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (dist->parsed()) return run_distance(model_a, model_b);

  gap::experiment::ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      config = gap::experiment::load_config(config_path);
    } else if (!experiment.empty()) {
      config = gap::experiment::preset(gap::experiment::parse_experiment(experiment));
    } else {
      gap::fail(gap::ErrorKind::ParseError, "one of --experiment or --config is required");
    }
  } catch (const gap::Error& e) {
    std::cerr << "gap: " << e.what() << '\n';
    return 2;
  }
  if (seed) config.optimizer.seed = *seed;
  if (samples) config.optimizer.mc_samples = *samples;
  if (max_iters) config.optimizer.max_iters = *max_iters;
  if (step_mu) config.optimizer.step_mu = *step_mu;
  if (step_l) config.optimizer.step_l = *step_l;
  if (threads) config.optimizer.threads = *threads;
  if (!out.empty()) config.output_dir = out;
  return gap::experiment::run_experiment(config).exit_code;
}
