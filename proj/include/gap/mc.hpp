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

#ifndef GAP_MC_HPP
#define GAP_MC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gap/error.hpp"
#include "gap/geometry.hpp"
#include "gap/parallel.hpp"
#include "gap/random.hpp"
#include "gap/tangent.hpp"
#include "gap/types.hpp"

/**
 * \file
 * \brief Monte Carlo estimates of the overlap and the projections of √p₀ on the tangent basis.
 *
 * With z ~ q² and r(z) = √p₀(z)/q(z), every inner product ⟨f, √p₀⟩ with f = q·g equals E[r·g].
 * Weights are carried as log r and exponentiated after subtracting their maximum. For an
 * unnormalized target each estimate is divided by √Ẑ with Ẑ = E[r²] from the same batch.
 */

namespace gap::mc {

/// log r below which a weight counts as zero (1e-300).
inline constexpr double kLogWeightFloor = -690.7755278982137;

struct MCEstimates {
  Vector a;
  Vector b;
  double overlap = 0.0;      ///< clamped
  double overlap_raw = 0.0;  ///< before clamping
  /// Ẑ = E[r²]; 1 for normalized targets.
  double norm_est = 1.0;
  double log_norm_est = 0.0;
  Vector se_a;
  Vector se_b;
  double se_overlap = 0.0;
  std::size_t n_samples = 0;
};

/// T×D matrix of draws z_t = μ + L·ξ_t; row t depends only on (seed, t).
inline Matrix draw_samples(const GaussianModel& model, std::size_t n, std::uint64_t seed, std::size_t threads = 1) {
  if (n < 2) {
    fail(ErrorKind::InvalidArgument, "need at least 2 samples");
  }
  const auto d = model.dim();
  Matrix xi(static_cast<Eigen::Index>(n), d);
  parallel::for_each_chunk(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      for (Eigen::Index k = 0; k < d; ++k) {
        xi(static_cast<Eigen::Index>(t), k) =
            random::standard_normal(seed, random::Stream::GaussianSamples, t, static_cast<std::uint32_t>(k));
      }
    }
  });
  Matrix z = xi * model.chol().transpose();
  z.rowwise() += model.mean().transpose();
  return z;
}

/// log(√p̃₀(z)/q(z)).
inline double log_weight(const GaussianModel& model, const TargetDensity& target, const ConstVectorRef& z) {
  if (target.dim != model.dim() || z.size() != model.dim()) {
    fail(ErrorKind::DimensionMismatch, "target, model and point dimensions differ");
  }
  return target.log_sqrt(z) - gaussian_log_sqrt_density(model, z);
}

/// Log weights for every row of `samples`, evaluated in parallel.
inline std::vector<double> log_weights(const GaussianModel& model, const TargetDensity& target, const Matrix& samples,
                                       std::size_t threads = 1) {
  if (samples.cols() != model.dim() || target.dim != model.dim()) {
    fail(ErrorKind::DimensionMismatch, "sample, model and target dimensions differ");
  }
  std::vector<double> lw(static_cast<std::size_t>(samples.rows()));
  parallel::for_each_chunk(lw.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const Vector z = samples.row(static_cast<Eigen::Index>(t)).transpose();
      lw[t] = log_weight(model, target, z);
    }
  });
  return lw;
}

namespace detail {

/// Shifted weights e_t = exp(lw_t − max lw); returns the shift.
inline double shifted_weights(const std::vector<double>& lw, std::vector<double>& e) {
  double shift = -kInf;
  for (double v : lw) {
    if (std::isnan(v)) {
      fail(ErrorKind::DegenerateWeights, "NaN importance weight");
    }
    shift = std::max(shift, v);
  }
  if (!(shift >= kLogWeightFloor)) {
    fail(ErrorKind::DegenerateWeights, "every importance weight is below 1e-300");
  }
  if (std::isinf(shift)) {
    fail(ErrorKind::DegenerateWeights, "infinite importance weight");
  }
  e.resize(lw.size());
  for (std::size_t t = 0; t < lw.size(); ++t) e[t] = std::exp(lw[t] - shift);
  return shift;
}

inline double mean_of(std::span<const double> x) {
  return parallel::pairwise_sum(x) / static_cast<double>(x.size());
}

/// Column means of a row-per-sample buffer, each reduced pairwise in sample order.
inline std::vector<double> column_means(const std::vector<double>& buf, std::size_t n, std::size_t cols) {
  std::vector<double> out(cols);
  std::vector<double> col(n);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t t = 0; t < n; ++t) col[t] = buf[t * cols + c];
    out[c] = mean_of(col);
  }
  return out;
}

/// Estimate and standard error of mean(x)·scale/√mean(s) by the delta method; s is ignored
/// (treated as the constant 1) when `self_normalize` is false.
struct RatioStats {
  double value;
  double se;
};

inline RatioStats ratio_estimate(std::span<const double> x, std::span<const double> s, double scale,
                                 bool self_normalize) {
  const double n = static_cast<double>(x.size());
  const double mx = mean_of(x);
  std::vector<double> dev(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) dev[t] = (x[t] - mx) * (x[t] - mx);
  const double var_x = parallel::pairwise_sum(dev) / (n - 1.0);
  if (!self_normalize) {
    return {mx * scale, std::sqrt(var_x / n) * scale};
  }
  const double ms = mean_of(s);
  std::vector<double> dev_s(s.size());
  std::vector<double> cross(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    dev_s[t] = (s[t] - ms) * (s[t] - ms);
    cross[t] = (x[t] - mx) * (s[t] - ms);
  }
  const double var_s = parallel::pairwise_sum(dev_s) / (n - 1.0);
  const double cov_xs = parallel::pairwise_sum(cross) / (n - 1.0);
  const double g1 = 1.0 / std::sqrt(ms);
  const double g2 = -0.5 * mx / (ms * std::sqrt(ms));
  const double var = (g1 * g1 * var_x + 2.0 * g1 * g2 * cov_xs + g2 * g2 * var_s) / n;
  return {mx / std::sqrt(ms), std::sqrt(std::max(0.0, var))};
}

}  // namespace detail

/// Overlap, a and b from one shared batch. `gram` may be null, in which case b is left empty.
inline MCEstimates estimate_all(const GaussianModel& model, const TargetDensity& target, const Matrix& samples,
                                const tangent::TangentGram* gram, double clamp = geometry::kDefaultOverlapClamp,
                                std::size_t threads = 1) {
  const auto n = static_cast<std::size_t>(samples.rows());
  if (n < 2) {
    fail(ErrorKind::InvalidArgument, "need at least 2 samples");
  }
  const auto d = static_cast<std::size_t>(model.dim());
  const std::size_t m = gram ? static_cast<std::size_t>(gram->b.rows()) : 0;
  const std::vector<double> lw = log_weights(model, target, samples, threads);
  std::vector<double> e;
  const double shift = detail::shifted_weights(lw, e);
  const bool self_normalize = !target.normalized;

  const Matrix precision = gram ? gram->precision : model.precision();
  const std::size_t cols = d + m;
  std::vector<double> terms(n * cols);
  parallel::for_each_chunk(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const Vector y = precision * (samples.row(static_cast<Eigen::Index>(t)).transpose() - model.mean());
      double* row = terms.data() + t * cols;
      for (std::size_t i = 0; i < d; ++i) row[i] = e[t] * 0.5 * y(static_cast<Eigen::Index>(i));
      if (gram) {
        const Vector c = tangent::cov_direction_row(*gram, y);
        for (std::size_t i = 0; i < m; ++i) row[d + i] = e[t] * c(static_cast<Eigen::Index>(i));
      }
    }
  });

  std::vector<double> e2(n);
  for (std::size_t t = 0; t < n; ++t) e2[t] = e[t] * e[t];
  const double mean_e2 = detail::mean_of(e2);

  MCEstimates out;
  out.n_samples = n;
  out.log_norm_est = self_normalize ? std::log(mean_e2) + 2.0 * shift : 0.0;
  out.norm_est = std::exp(out.log_norm_est);
  // For normalized targets estimates are mean(·)·exp(shift); otherwise the shift cancels in the ratio.
  const double scale = self_normalize ? 1.0 : std::exp(shift);

  const auto ov = detail::ratio_estimate(e, e2, scale, self_normalize);
  out.overlap_raw = ov.value;
  out.overlap = geometry::clamp_overlap(ov.value, clamp);
  out.se_overlap = ov.se;

  out.a.resize(static_cast<Eigen::Index>(d));
  out.se_a.resize(static_cast<Eigen::Index>(d));
  out.b.resize(static_cast<Eigen::Index>(m));
  out.se_b.resize(static_cast<Eigen::Index>(m));
  std::vector<double> col(n);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t t = 0; t < n; ++t) col[t] = terms[t * cols + c];
    const auto r = detail::ratio_estimate(col, e2, scale, self_normalize);
    if (c < d) {
      out.a(static_cast<Eigen::Index>(c)) = r.value;
      out.se_a(static_cast<Eigen::Index>(c)) = r.se;
    } else {
      out.b(static_cast<Eigen::Index>(c - d)) = r.value;
      out.se_b(static_cast<Eigen::Index>(c - d)) = r.se;
    }
  }
  if (!std::isfinite(out.overlap_raw) || !out.a.allFinite() || !out.b.allFinite()) {
    fail(ErrorKind::DegenerateWeights, "non-finite Monte Carlo estimate");
  }
  return out;
}

/// ⟨θ, √p₀⟩ with its standard error (clamped value).
inline std::pair<double, double> estimate_overlap(const GaussianModel& model, const TargetDensity& target,
                                                  const Matrix& samples, double clamp = geometry::kDefaultOverlapClamp,
                                                  std::size_t threads = 1) {
  const MCEstimates est = estimate_all(model, target, samples, nullptr, clamp, threads);
  return {est.overlap, est.se_overlap};
}

/// Ẑ = mean of r(z)², computed in the log domain.
inline double estimate_normalizer(const GaussianModel& model, const TargetDensity& target, const Matrix& samples,
                                  std::size_t threads = 1) {
  const std::vector<double> lw = log_weights(model, target, samples, threads);
  std::vector<double> doubled(lw.size());
  for (std::size_t t = 0; t < lw.size(); ++t) doubled[t] = 2.0 * lw[t];
  std::vector<double> e;
  const double shift = detail::shifted_weights(doubled, e);
  return std::exp(std::log(detail::mean_of(e)) + shift);
}

inline std::pair<Vector, Vector> estimate_a(const GaussianModel& model, const TargetDensity& target,
                                            const Matrix& samples, std::size_t threads = 1) {
  MCEstimates est = estimate_all(model, target, samples, nullptr, geometry::kDefaultOverlapClamp, threads);
  return {std::move(est.a), std::move(est.se_a)};
}

inline std::pair<Vector, Vector> estimate_b(const GaussianModel& model, const TargetDensity& target,
                                            const Matrix& samples, const tangent::TangentGram& gram,
                                            std::size_t threads = 1) {
  MCEstimates est = estimate_all(model, target, samples, &gram, geometry::kDefaultOverlapClamp, threads);
  return {std::move(est.b), std::move(est.se_b)};
}

/// ⟨w_j, √p₀⟩ = Σ_i C_ji·a_i for both blocks.
inline std::pair<Vector, Vector> project_onto_orthobasis(const MCEstimates& est, const tangent::TangentGram& gram) {
  if (est.a.size() != gram.coeff_mu.rows() || est.b.size() != gram.coeff_l.rows()) {
    fail(ErrorKind::DimensionMismatch, "estimates and Gram blocks differ in size");
  }
  return {gram.coeff_mu * est.a, gram.coeff_l * est.b};
}

}  // namespace gap::mc

#endif
