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

#ifndef GAP_GEOMETRY_HPP
#define GAP_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "gap/error.hpp"
#include "gap/types.hpp"

/**
 * \file
 * \brief Geometry of the unit sphere of square-root densities.
 *
 * Densities p map to q = √p, which lie on the unit sphere of L². Distances are great-circle
 * (arccos of the overlap ∫√(p p')) and geodesics are great circles. One-dimensional
 * function-level operations run on uniform trapezoid grids.
 */

namespace gap::geometry {

/// Nodes used by the default 1-D quadrature.
inline constexpr std::size_t kDefaultGridNodes = 4001;
/// Half-width of the default grid in standard deviations.
inline constexpr double kDefaultGridHalfWidth = 12.0;
/// Default clamp applied to overlaps before arccos and the gradient denominator.
inline constexpr double kDefaultOverlapClamp = 1e-9;

/// A density p sampled on a strictly increasing grid.
struct GridDensity {
  std::vector<double> grid;
  std::vector<double> values;
  bool normalized = true;
};

/// A function in the square-root domain (q = √p, or a tangent direction) on a grid.
struct GridFunction {
  std::vector<double> grid;
  std::vector<double> values;
};

inline void validate_grid(const std::vector<double>& grid, std::size_t n_values) {
  if (grid.size() < 2 || grid.size() != n_values) {
    fail(ErrorKind::GridMismatch, "grid and values must have equal length of at least 2");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      fail(ErrorKind::GridMismatch, "grid must be strictly increasing");
    }
  }
}

inline void require_same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  if (a != b) {
    fail(ErrorKind::GridMismatch, "functions live on different grids");
  }
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t nodes) {
  if (!(hi > lo) || nodes < 2) {
    fail(ErrorKind::InvalidArgument, "uniform grid needs hi > lo and at least 2 nodes");
  }
  std::vector<double> grid(nodes);
  const double h = (hi - lo) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) {
    grid[i] = lo + h * static_cast<double>(i);
  }
  grid.back() = hi;
  return grid;
}

/// Trapezoid rule for samples of f on `grid`.
inline double trapezoid(const std::vector<double>& grid, const std::vector<double>& f) {
  validate_grid(grid, f.size());
  double sum = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    sum += 0.5 * (grid[i] - grid[i - 1]) * (f[i] + f[i - 1]);
  }
  return sum;
}

/// Grid covering μ ± 12σ of every listed Gaussian.
inline std::vector<double> default_grid(std::initializer_list<ScalarGaussian> gaussians,
                                        std::size_t nodes = kDefaultGridNodes) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& g : gaussians) {
    const double s = std::abs(g.sigma);
    lo = std::min(lo, g.mean - kDefaultGridHalfWidth * s);
    hi = std::max(hi, g.mean + kDefaultGridHalfWidth * s);
  }
  return uniform_grid(lo, hi, nodes);
}

inline GridDensity gaussian_on_grid(const ScalarGaussian& g, const std::vector<double>& grid) {
  GridDensity out{grid, std::vector<double>(grid.size()), true};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.values[i] = std::exp(2.0 * scalar_log_sqrt_density(g, grid[i]));
  }
  return out;
}

/// Samples p̃₀ = exp(2·log_sqrt) of a 1-D target.
inline GridDensity target_on_grid(const TargetDensity& target, const std::vector<double>& grid) {
  if (target.dim != 1) {
    fail(ErrorKind::DimensionMismatch, "grid evaluation needs a one-dimensional target");
  }
  GridDensity out{grid, std::vector<double>(grid.size()), target.normalized};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.values[i] = std::exp(2.0 * target.log_sqrt_1d(grid[i]));
  }
  return out;
}

inline GridFunction sqrt_of(const GridDensity& p) {
  validate_grid(p.grid, p.values.size());
  GridFunction q{p.grid, std::vector<double>(p.values.size())};
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (p.values[i] < 0.0) {
      fail(ErrorKind::InvalidArgument, "density values must be nonnegative");
    }
    q.values[i] = std::sqrt(p.values[i]);
  }
  return q;
}

/// L² inner product of two grid functions.
inline double inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid, g.grid);
  std::vector<double> prod(f.values.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f.values[i] * g.values[i];
  return trapezoid(f.grid, prod);
}

inline double l2_norm(const GridFunction& f) { return std::sqrt(inner(f, f)); }

/// ∫√(p·p2) by the trapezoid rule.
inline double overlap_quadrature_1d(const GridDensity& p, const GridDensity& p2) {
  validate_grid(p.grid, p.values.size());
  validate_grid(p2.grid, p2.values.size());
  require_same_grid(p.grid, p2.grid);
  std::vector<double> f(p.values.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::sqrt(std::max(0.0, p.values[i]) * std::max(0.0, p2.values[i]));
  }
  return trapezoid(p.grid, f);
}

inline double clamp_overlap(double overlap, double clamp) {
  return std::clamp(overlap, -1.0 + clamp, 1.0 - clamp);
}

/// arccos of the clamped overlap.
inline double spherical_fisher_distance(double overlap, double clamp = kDefaultOverlapClamp) {
  return std::acos(clamp_overlap(overlap, clamp));
}

/// Closed-form ∫√(p₁p₂) for two Gaussians.
inline double bhattacharyya_overlap_gaussians(const GaussianModel& g1, const GaussianModel& g2) {
  if (g1.dim() != g2.dim()) {
    fail(ErrorKind::DimensionMismatch, "Gaussians have different dimensions");
  }
  const Matrix avg = 0.5 * (g1.covariance() + g2.covariance());
  Eigen::LLT<Matrix> llt(avg);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::NotSPD, "average covariance is not positive definite");
  }
  const Vector diff = g1.mean() - g2.mean();
  const double maha = diff.dot(llt.solve(diff));
  double log_det_avg = 0.0;
  const Matrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det_avg += 2.0 * std::log(l(i, i));
  const double log_bc = -0.125 * maha - 0.5 * (log_det_avg - 0.5 * (g1.log_det_cov() + g2.log_det_cov()));
  return std::exp(log_bc);
}

/// √(1 − overlap); the spherical distance is arccos(1 − H²).
inline double hellinger_distance(double overlap) { return std::sqrt(std::max(0.0, 1.0 - overlap)); }

/// Point at arc length t along the great circle from q towards q2.
inline GridFunction geodesic_point(const GridFunction& q, const GridFunction& q2, double t) {
  require_same_grid(q.grid, q2.grid);
  const double c = inner(q2, q);
  if (std::abs(c) >= 1.0 - 1e-9) {
    fail(ErrorKind::AntipodalOrEqual, "endpoints coincide or are antipodal; no canonical direction");
  }
  GridFunction dir{q.grid, std::vector<double>(q.values.size())};
  for (std::size_t i = 0; i < dir.values.size(); ++i) dir.values[i] = q2.values[i] - q.values[i] * c;
  const double norm = l2_norm(dir);
  GridFunction out{q.grid, std::vector<double>(q.values.size())};
  const double ct = std::cos(t);
  const double st = std::sin(t);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = q.values[i] * ct + dir.values[i] / norm * st;
  }
  return out;
}

/// Great circle through q with unit initial velocity f (f ⊥ q).
inline GridFunction geodesic_from_velocity(const GridFunction& q, const GridFunction& f, double t) {
  require_same_grid(q.grid, f.grid);
  GridFunction out{q.grid, std::vector<double>(q.values.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = q.values[i] * std::cos(t) + f.values[i] * std::sin(t);
  }
  return out;
}

/// 1/√(1 − c²) for the clamped overlap c, the common factor of the negative gradient.
inline double negative_gradient_scale(double overlap, double clamp = kDefaultOverlapClamp) {
  const double c = clamp_overlap(overlap, clamp);
  return 1.0 / std::sqrt(1.0 - c * c);
}

/// Push-forwards ∂q/∂μ and ∂q/∂σ of a 1-D Gaussian on a grid.
inline std::pair<GridFunction, GridFunction> scalar_tangent_basis(const ScalarGaussian& g,
                                                                  const std::vector<double>& grid) {
  GridFunction v_mu{grid, std::vector<double>(grid.size())};
  GridFunction v_sigma{grid, std::vector<double>(grid.size())};
  const double s = g.sigma;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid[i] - g.mean;
    const double q = std::exp(scalar_log_sqrt_density(g, grid[i]));
    v_mu.values[i] = q * d / (2.0 * s * s);
    v_sigma.values[i] = q * (-0.5 / s + 0.5 * d * d / (s * s * s));
  }
  return {v_mu, v_sigma};
}

/// Directional derivative of d(θ, √p₀) along (dμ, dσ) for a 1-D Gaussian, by quadrature.
/**
 * Evaluates −⟨θ̇, √p₀⟩ / √(1 − ⟨θ, √p₀⟩²) with θ̇ = dμ·∂q/∂μ + dσ·∂q/∂σ.
 */
inline double distance_directional_derivative_1d(const ScalarGaussian& g, double d_mu, double d_sigma,
                                                 const TargetDensity& target, const std::vector<double>& grid) {
  const GridFunction root_target = sqrt_of(target_on_grid(target, grid));
  const GridFunction q = sqrt_of(gaussian_on_grid(g, grid));
  const auto [v_mu, v_sigma] = scalar_tangent_basis(g, grid);
  GridFunction theta_dot{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    theta_dot.values[i] = d_mu * v_mu.values[i] + d_sigma * v_sigma.values[i];
  }
  const double overlap = inner(q, root_target);
  return -inner(theta_dot, root_target) / std::sqrt(1.0 - overlap * overlap);
}

/// Spherical distance between a 1-D Gaussian and a normalized 1-D target by quadrature.
inline double distance_to_target_1d(const ScalarGaussian& g, const TargetDensity& target,
                                    const std::vector<double>& grid, double clamp = kDefaultOverlapClamp) {
  return spherical_fisher_distance(overlap_quadrature_1d(gaussian_on_grid(g, grid), target_on_grid(target, grid)),
                                   clamp);
}

}  // namespace gap::geometry

#endif
