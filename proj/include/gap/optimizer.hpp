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

#ifndef GAP_OPTIMIZER_HPP
#define GAP_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gap/error.hpp"
#include "gap/geometry.hpp"
#include "gap/matops.hpp"
#include "gap/mc.hpp"
#include "gap/random.hpp"
#include "gap/tangent.hpp"
#include "gap/types.hpp"

/**
 * \file
 * \brief The descent loop on the spherical Fisher distance.
 *
 * Each iteration draws a fresh batch from q², estimates the projections of √p₀ on an
 * orthonormal tangent basis, scales them by 1/√(1 − overlap²) and moves every parameter
 * by its step size times its coefficient.
 */

namespace gap {

enum class StopReason { GradTol, DistTol, MaxIters };

constexpr const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::GradTol: return "grad_tol";
    case StopReason::DistTol: return "dist_tol";
    case StopReason::MaxIters: return "max_iters";
  }
  return "unknown";
}

struct GapResult {
  GaussianModel final_model;
  GapTrace trace;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIters;
};

/// Raised when a run aborts part-way; carries the iterations completed so far.
class RunFailure : public Error {
 public:
  RunFailure(const Error& cause, GapTrace partial)
      : Error(cause.kind(), std::string("run aborted: ") + cause.what()), trace_(std::move(partial)) {}

  [[nodiscard]] const GapTrace& trace() const noexcept { return trace_; }

 private:
  GapTrace trace_;
};

/// Maximum number of step halvings before a singular-L outcome is fatal.
inline constexpr int kMaxStepHalvings = 5;

struct StepResult {
  GaussianModel model;
  TraceRecord record;
  int halvings = 0;
};

namespace detail {

inline Vector block_steps(double block, const std::vector<double>& per_coord, Eigen::Index n, const char* name) {
  if (per_coord.empty()) return Vector::Constant(n, block);
  if (static_cast<Eigen::Index>(per_coord.size()) != n) {
    fail(ErrorKind::DimensionMismatch, std::string(name) + " has the wrong length");
  }
  return Eigen::Map<const Vector>(per_coord.data(), n);
}

inline bool diagonal_ok(const Vector& vech, Eigen::Index dim) {
  if (!vech.allFinite()) return false;
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (!(std::abs(vech(k)) >= kCholDiagonalFloor)) return false;
    k += dim - j;
  }
  return true;
}

class StopMonitor {
 public:
  explicit StopMonitor(const OptimizerConfig& config) : config_(config) {}

  std::optional<StopReason> update(const GapTrace& trace) {
    const TraceRecord& last = trace.back();
    below_ = (last.grad_norm < config_.grad_tol) ? below_ + 1 : 0;
    if (below_ >= config_.grad_patience) return StopReason::GradTol;
    const std::size_t w = config_.dist_window;
    if (trace.size() >= 2 * w) {
      double recent = 0.0;
      double previous = 0.0;
      for (std::size_t i = 0; i < w; ++i) {
        recent += trace[trace.size() - 1 - i].distance;
        previous += trace[trace.size() - 1 - w - i].distance;
      }
      if (std::abs(recent - previous) / static_cast<double>(w) < config_.dist_tol) return StopReason::DistTol;
    }
    if (trace.size() >= config_.max_iters) return StopReason::MaxIters;
    return std::nullopt;
  }

 private:
  const OptimizerConfig& config_;
  std::size_t below_ = 0;
};

}  // namespace detail

/// One iteration at `model`. The record holds the pre-update parameters and distance.
inline StepResult gap_step(const GaussianModel& model, const TargetDensity& target, const tangent::TangentGram& gram,
                           const OptimizerConfig& config, std::uint64_t iter_seed) {
  config.validate();
  const auto d = model.dim();
  const Matrix samples = mc::draw_samples(model, config.mc_samples, iter_seed, config.threads);
  const mc::MCEstimates est = mc::estimate_all(model, target, samples, &gram, config.overlap_clamp, config.threads);
  const auto [proj_mu, proj_l] = mc::project_onto_orthobasis(est, gram);
  const double scale = geometry::negative_gradient_scale(est.overlap, config.overlap_clamp);
  const Vector eps_mu = detail::block_steps(config.step_mu, config.step_mu_per_coord, d, "step_mu_per_coord");
  const Vector eps_l =
      detail::block_steps(config.step_l, config.step_l_per_coord, proj_l.size(), "step_l_per_coord");

  TraceRecord record;
  record.mean = model.mean();
  record.vech_chol = model.vech_chol();
  record.overlap = est.overlap;
  record.distance = geometry::spherical_fisher_distance(est.overlap, config.overlap_clamp);
  record.grad_norm = scale * std::sqrt(proj_mu.squaredNorm() + proj_l.squaredNorm());

  double factor = 1.0;
  for (int halvings = 0; halvings <= kMaxStepHalvings; ++halvings, factor *= 0.5) {
    const Vector mean = model.mean() + factor * scale * eps_mu.cwiseProduct(proj_mu);
    const Vector vech = record.vech_chol + factor * scale * eps_l.cwiseProduct(proj_l);
    if (mean.allFinite() && detail::diagonal_ok(vech, d)) {
      return {GaussianModel::from_vech(mean, vech), std::move(record), halvings};
    }
  }
  fail(ErrorKind::StepProducedSingularL, "update left a near-zero Cholesky diagonal after 5 halvings");
}

inline GapResult gap_run(const GaussianModel& init, const TargetDensity& target, const OptimizerConfig& config) {
  config.validate();
  if (target.dim != init.dim()) {
    fail(ErrorKind::DimensionMismatch, "target and initial model dimensions differ");
  }
  const matops::OperatorMatrices ops = matops::build_operator_matrices(init.dim());
  GaussianModel model = init;
  GapTrace trace;
  detail::StopMonitor monitor(config);
  for (std::size_t iter = 0;; ++iter) {
    try {
      const tangent::TangentGram gram = tangent::build_tangent_gram(model, ops);
      StepResult step = gap_step(model, target, gram, config, random::iteration_seed(config.seed, iter));
      step.record.iter = iter;
      trace.push_back(std::move(step.record));
      model = std::move(step.model);
    } catch (const Error& e) {
      throw RunFailure(e, std::move(trace));
    }
    if (const auto reason = monitor.update(trace)) {
      return {model, std::move(trace), *reason != StopReason::MaxIters, *reason};
    }
  }
}

/// c₁, c₂, c₃ of the one-dimensional route and the quantities built from them.
struct Scalar1dEstimates {
  double c1 = 0.0;  ///< E_{q²}[h·(x−μ)²]
  double c2 = 0.0;  ///< E_{q²}[h·(x−μ)]
  double c3 = 0.0;  ///< E_{q²}[h]
  double overlap = 0.0;
  double proj_mu = 0.0;
  double proj_sigma = 0.0;
  double se_overlap = 0.0;
};

/// Estimates with h(x) = (√p₀/q)(x)·(π/(2σ²))^{1/4}; √p₀ is self-normalized for unnormalized targets.
/**
 * w_σ is v_σ/‖v_σ‖, which carries a factor sign(σ) relative to the closed form written for σ > 0.
 */
inline Scalar1dEstimates estimate_1d(const ScalarGaussian& g, const TargetDensity& target, const Matrix& samples,
                                     double clamp = geometry::kDefaultOverlapClamp, std::size_t threads = 1) {
  g.validate();
  if (target.dim != 1) {
    fail(ErrorKind::DimensionMismatch, "one-dimensional route needs a one-dimensional target");
  }
  const GaussianModel model = g.to_model();
  const std::vector<double> lw = mc::log_weights(model, target, samples, threads);
  std::vector<double> e;
  const double shift = mc::detail::shifted_weights(lw, e);
  const auto n = e.size();
  std::vector<double> e1(n);
  std::vector<double> e2(n);
  std::vector<double> esq(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double dx = samples(static_cast<Eigen::Index>(t), 0) - g.mean;
    e1[t] = e[t] * dx;
    e2[t] = e[t] * dx * dx;
    esq[t] = e[t] * e[t];
  }
  const bool self_normalize = !target.normalized;
  const double var = g.variance();
  const double kappa = std::pow(std::numbers::pi / (2.0 * var), -0.25);
  const double scale = (self_normalize ? 1.0 : std::exp(shift)) / kappa;
  const auto r3 = mc::detail::ratio_estimate(e, esq, scale, self_normalize);
  const auto r2 = mc::detail::ratio_estimate(e1, esq, scale, self_normalize);
  const auto r1 = mc::detail::ratio_estimate(e2, esq, scale, self_normalize);

  Scalar1dEstimates out;
  out.c1 = r1.value;
  out.c2 = r2.value;
  out.c3 = r3.value;
  out.overlap = geometry::clamp_overlap(kappa * out.c3, clamp);
  out.se_overlap = kappa * r3.se;
  out.proj_mu = kappa * out.c2 / std::abs(g.sigma);
  const double sign = g.sigma > 0.0 ? 1.0 : -1.0;
  out.proj_sigma = sign * kappa * (std::numbers::sqrt2 * out.c1 / (2.0 * var) - std::numbers::sqrt2 * out.c3 / 2.0);
  if (!std::isfinite(out.proj_mu) || !std::isfinite(out.proj_sigma) || !std::isfinite(out.overlap)) {
    fail(ErrorKind::DegenerateWeights, "non-finite one-dimensional estimate");
  }
  return out;
}

struct Scalar1dStep {
  ScalarGaussian next;
  TraceRecord record;
  int halvings = 0;
};

inline Scalar1dStep gap1d_step(const ScalarGaussian& g, const TargetDensity& target, const OptimizerConfig& config,
                               std::uint64_t iter_seed) {
  config.validate();
  const Matrix samples = mc::draw_samples(g.to_model(), config.mc_samples, iter_seed, config.threads);
  const Scalar1dEstimates est = estimate_1d(g, target, samples, config.overlap_clamp, config.threads);
  const double scale = geometry::negative_gradient_scale(est.overlap, config.overlap_clamp);

  TraceRecord record;
  record.mean = Vector::Constant(1, g.mean);
  record.vech_chol = Vector::Constant(1, g.sigma);
  record.overlap = est.overlap;
  record.distance = geometry::spherical_fisher_distance(est.overlap, config.overlap_clamp);
  record.grad_norm = scale * std::hypot(est.proj_mu, est.proj_sigma);

  double factor = 1.0;
  for (int halvings = 0; halvings <= kMaxStepHalvings; ++halvings, factor *= 0.5) {
    const ScalarGaussian next{g.mean + factor * config.step_mu * scale * est.proj_mu,
                              g.sigma + factor * config.step_l * scale * est.proj_sigma};
    if (std::isfinite(next.mean) && std::isfinite(next.sigma) && std::abs(next.sigma) >= kCholDiagonalFloor) {
      return {next, std::move(record), halvings};
    }
  }
  fail(ErrorKind::StepProducedSingularL, "update drove sigma to zero after 5 halvings");
}

inline GapResult gap1d_run(const ScalarGaussian& init, const TargetDensity& target, const OptimizerConfig& config) {
  config.validate();
  init.validate();
  ScalarGaussian g = init;
  GapTrace trace;
  detail::StopMonitor monitor(config);
  for (std::size_t iter = 0;; ++iter) {
    try {
      Scalar1dStep step = gap1d_step(g, target, config, random::iteration_seed(config.seed, iter));
      step.record.iter = iter;
      trace.push_back(std::move(step.record));
      g = step.next;
    } catch (const Error& e) {
      throw RunFailure(e, std::move(trace));
    }
    if (const auto reason = monitor.update(trace)) {
      return {g.to_model(), std::move(trace), *reason != StopReason::MaxIters, *reason};
    }
  }
}

/// Average of the mean and of Σ = LLᵀ over the last `count` records.
inline GaussianModel tail_average(const GapTrace& trace, std::size_t count) {
  if (trace.empty() || count == 0) {
    fail(ErrorKind::InvalidArgument, "tail average needs a nonempty trace and count");
  }
  count = std::min(count, trace.size());
  const auto d = trace.back().mean.size();
  Vector mean = Vector::Zero(d);
  Matrix cov = Matrix::Zero(d, d);
  for (std::size_t i = trace.size() - count; i < trace.size(); ++i) {
    const GaussianModel m = GaussianModel::from_vech(trace[i].mean, trace[i].vech_chol);
    mean += m.mean();
    cov += m.covariance();
  }
  mean /= static_cast<double>(count);
  cov /= static_cast<double>(count);
  return GaussianModel::from_covariance(mean, cov);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with header iter,mu_1..mu_D,l_1..l_m,overlap,distance,grad_norm.
/// `dim` sizes the header when the trace is empty; otherwise it is taken from the records.
inline void write_trace_csv(std::ostream& os, const GapTrace& trace, Eigen::Index dim = 0) {
  if (trace.empty() && dim < 1) return;
  const auto d = trace.empty() ? dim : trace.front().mean.size();
  const auto m = trace.empty() ? dim * (dim + 1) / 2 : trace.front().vech_chol.size();
  os << "iter";
  for (Eigen::Index i = 1; i <= d; ++i) os << ",mu_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",l_" << i;
  os << ",overlap,distance,grad_norm\n";
  for (const auto& r : trace) {
    os << r.iter;
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << format_double(r.mean(i));
    for (Eigen::Index i = 0; i < m; ++i) os << ',' << format_double(r.vech_chol(i));
    os << ',' << format_double(r.overlap) << ',' << format_double(r.distance) << ',' << format_double(r.grad_norm)
       << '\n';
  }
}

}  // namespace gap

#endif
