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

#ifndef GAP_TYPES_HPP
#define GAP_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gap/error.hpp"

/**
 * \file
 * \brief Shared domain types: the Gaussian approximating point, targets, optimizer settings and traces.
 */

namespace gap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Diagonal magnitude below which a Cholesky factor is treated as singular.
inline constexpr double kCholDiagonalFloor = 1e-12;

/// Throws unless `chol` is a valid lower-triangular factor matching `mean`.
inline void validate_gaussian(const Vector& mean, const Matrix& chol) {
  const auto dim = mean.size();
  if (dim < 1) {
    fail(ErrorKind::DimensionMismatch, "Gaussian dimension must be positive");
  }
  if (chol.rows() != dim || chol.cols() != dim) {
    fail(ErrorKind::DimensionMismatch, "Cholesky factor is " + std::to_string(chol.rows()) + "x" +
                                           std::to_string(chol.cols()) + ", mean has length " +
                                           std::to_string(dim));
  }
  for (Eigen::Index j = 1; j < dim; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (chol(i, j) != 0.0) {
        fail(ErrorKind::NotLowerTriangular, "entry above the diagonal at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ") is nonzero");
      }
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(std::abs(chol(i, i)) >= kCholDiagonalFloor)) {
      fail(ErrorKind::ZeroDiagonal, "|L(" + std::to_string(i) + "," + std::to_string(i) + ")| below 1e-12");
    }
  }
  if (!mean.allFinite() || !chol.allFinite()) {
    fail(ErrorKind::InvalidArgument, "non-finite Gaussian parameters");
  }
}

/// Point on the Gaussian model manifold: mean and lower-triangular Cholesky factor.
/**
 * Entries of the factor are unconstrained (signs included), so Σ = L·Lᵀ is positive definite
 * whenever every diagonal entry is away from zero. Instances are immutable and validated on
 * construction.
 */
class GaussianModel {
 public:
  GaussianModel(Vector mean, Matrix chol) : mean_(std::move(mean)), chol_(std::move(chol)) {
    validate_gaussian(mean_, chol_);
    log_det_cov_ = 0.0;
    for (Eigen::Index i = 0; i < dim(); ++i) {
      log_det_cov_ += 2.0 * std::log(std::abs(chol_(i, i)));
    }
  }

  /// Builds the factor from its column-major lower-triangle vectorization.
  static GaussianModel from_vech(Vector mean, const Vector& vech_chol) {
    const auto dim = mean.size();
    if (vech_chol.size() != dim * (dim + 1) / 2) {
      fail(ErrorKind::DimensionMismatch, "vech(L) length does not match dimension");
    }
    Matrix chol = Matrix::Zero(dim, dim);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      for (Eigen::Index i = j; i < dim; ++i) {
        chol(i, j) = vech_chol(k++);
      }
    }
    return {std::move(mean), std::move(chol)};
  }

  /// Uses the positive-diagonal Cholesky factor of `cov`.
  static GaussianModel from_covariance(Vector mean, const Matrix& cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::NotSPD, "covariance is not positive definite");
    }
    return {std::move(mean), llt.matrixL()};
  }

  [[nodiscard]] Eigen::Index dim() const { return mean_.size(); }
  [[nodiscard]] const Vector& mean() const { return mean_; }
  [[nodiscard]] const Matrix& chol() const { return chol_; }
  [[nodiscard]] Matrix covariance() const { return chol_ * chol_.transpose(); }
  [[nodiscard]] double log_det_cov() const { return log_det_cov_; }

  [[nodiscard]] Vector vech_chol() const {
    Vector out(dim() * (dim() + 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < dim(); ++j) {
      for (Eigen::Index i = j; i < dim(); ++i) {
        out(k++) = chol_(i, j);
      }
    }
    return out;
  }

  /// Σ⁻¹ assembled from triangular solves against L.
  [[nodiscard]] Matrix precision() const {
    const Matrix linv = chol_.triangularView<Eigen::Lower>().solve(Matrix::Identity(dim(), dim()));
    return linv.transpose() * linv;
  }

  /// L⁻¹(z − μ).
  [[nodiscard]] Vector whiten(const ConstVectorRef& z) const {
    return chol_.triangularView<Eigen::Lower>().solve(z - mean_);
  }

 private:
  Vector mean_;
  Matrix chol_;
  double log_det_cov_ = 0.0;
};

/// log q(z | μ, Σ), the log square-root density of the model.
inline double gaussian_log_sqrt_density(const GaussianModel& model, const ConstVectorRef& z) {
  if (z.size() != model.dim()) {
    fail(ErrorKind::DimensionMismatch, "point has length " + std::to_string(z.size()) + ", model dimension " +
                                           std::to_string(model.dim()));
  }
  const double dim = static_cast<double>(model.dim());
  const double quad = model.whiten(z).squaredNorm();
  return -0.25 * dim * std::log(2.0 * std::numbers::pi) - 0.25 * model.log_det_cov() - 0.25 * quad;
}

/// One-dimensional Gaussian with a signed scale; only σ² enters the density.
struct ScalarGaussian {
  double mean = 0.0;
  double sigma = 1.0;

  [[nodiscard]] double variance() const { return sigma * sigma; }

  void validate() const {
    if (!(std::isfinite(mean) && std::isfinite(sigma)) || sigma == 0.0) {
      fail(ErrorKind::ZeroDiagonal, "scalar Gaussian needs finite mean and nonzero sigma");
    }
  }

  [[nodiscard]] GaussianModel to_model() const {
    return {Vector::Constant(1, mean), Matrix::Constant(1, 1, sigma)};
  }
};

inline double scalar_log_sqrt_density(const ScalarGaussian& g, double x) {
  const double v = g.variance();
  const double d = x - g.mean;
  return -0.25 * std::log(2.0 * std::numbers::pi * v) - d * d / (4.0 * v);
}

/// Target p₀ described by its log square-root density ½·log p̃₀.
/**
 * When `normalized` is false the density is known only up to a constant and estimators
 * self-normalize. `support` optionally bounds where a 1-D target carries its mass, for quadrature.
 */
struct TargetDensity {
  std::string name;
  Eigen::Index dim = 1;
  std::function<double(const ConstVectorRef&)> log_sqrt;
  bool normalized = true;
  std::optional<double> log_normalizer;
  std::optional<std::pair<double, double>> support;

  [[nodiscard]] double operator()(const ConstVectorRef& z) const { return log_sqrt(z); }

  [[nodiscard]] double log_sqrt_1d(double x) const {
    const Vector z = Vector::Constant(1, x);
    return log_sqrt(z);
  }
};

/// Target equal to the model's own density, p₀ = q².
inline TargetDensity gaussian_target(const GaussianModel& model) {
  TargetDensity target;
  target.name = "gaussian";
  target.dim = model.dim();
  target.log_sqrt = [model](const ConstVectorRef& z) { return gaussian_log_sqrt_density(model, z); };
  target.normalized = true;
  target.log_normalizer = 0.0;
  if (model.dim() == 1) {
    const double s = std::abs(model.chol()(0, 0));
    target.support = std::pair{model.mean()(0) - 12.0 * s, model.mean()(0) + 12.0 * s};
  }
  return target;
}

struct OptimizerConfig {
  double step_mu = 0.1;
  double step_l = 0.1;
  std::size_t mc_samples = 10'000;
  std::size_t max_iters = 1000;
  double grad_tol = 1e-3;
  double dist_tol = 1e-4;
  double overlap_clamp = 1e-9;
  std::uint64_t seed = 0;
  std::size_t dist_window = 25;
  std::size_t grad_patience = 3;
  /// Worker threads for Monte Carlo evaluation; 0 picks the hardware concurrency.
  std::size_t threads = 1;
  /// Per-coordinate overrides of step_mu / step_l; empty means use the block value.
  std::vector<double> step_mu_per_coord;
  std::vector<double> step_l_per_coord;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        fail(ErrorKind::InvalidArgument, std::string(name) + " must be positive");
      }
    };
    positive(step_mu, "step_mu");
    positive(step_l, "step_l");
    positive(grad_tol, "grad_tol");
    positive(dist_tol, "dist_tol");
    if (!(overlap_clamp > 0.0 && overlap_clamp <= 1e-3)) {
      fail(ErrorKind::InvalidArgument, "overlap_clamp must lie in (0, 1e-3]");
    }
    if (mc_samples < 2) {
      fail(ErrorKind::InvalidArgument, "mc_samples must be at least 2");
    }
    if (max_iters < 1) {
      fail(ErrorKind::InvalidArgument, "max_iters must be positive");
    }
    if (dist_window < 1 || grad_patience < 1) {
      fail(ErrorKind::InvalidArgument, "dist_window and grad_patience must be positive");
    }
    for (double v : step_mu_per_coord) positive(v, "step_mu_per_coord");
    for (double v : step_l_per_coord) positive(v, "step_l_per_coord");
  }
};

struct TraceRecord {
  std::size_t iter = 0;
  Vector mean;
  Vector vech_chol;
  double overlap = 0.0;
  double distance = 0.0;
  double grad_norm = 0.0;
};

using GapTrace = std::vector<TraceRecord>;

}  // namespace gap

#endif
