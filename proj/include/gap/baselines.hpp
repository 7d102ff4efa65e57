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

#ifndef GAP_BASELINES_HPP
#define GAP_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gap/error.hpp"
#include "gap/geometry.hpp"
#include "gap/nelder_mead.hpp"
#include "gap/types.hpp"

/**
 * \file
 * \brief Reference approximations: Laplace's method and one-dimensional divergence minimizers.
 *
 * D_α(p‖p′) = ∫ [αp + (1−α)p′ − p^α p′^{1−α}] / (α(1−α)), with p the target and p′ the
 * Gaussian. α → 0 gives KL(p′‖p), α → 1 gives KL(p‖p′) and α = ½ gives 4H².
 */

namespace gap::baselines {

struct DivergenceKind {
  enum class Kind { Alpha, KL, ReverseKL, Hellinger };
  Kind kind = Kind::Hellinger;
  double alpha = 0.5;

  static DivergenceKind make_alpha(double a) { return {Kind::Alpha, a}; }
  static DivergenceKind kl() { return {Kind::KL, 0.0}; }
  static DivergenceKind reverse_kl() { return {Kind::ReverseKL, 1.0}; }
  static DivergenceKind hellinger() { return {Kind::Hellinger, 0.5}; }

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case Kind::Alpha: return "alpha_" + format_alpha(alpha);
      case Kind::KL: return "kl";
      case Kind::ReverseKL: return "reverse_kl";
      case Kind::Hellinger: return "hellinger";
    }
    return "unknown";
  }

 private:
  static std::string format_alpha(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
  }
};

/// Parses "kl", "reverse_kl", "hellinger" or "alpha:<value>".
inline DivergenceKind parse_divergence(const std::string& text) {
  if (text == "kl") return DivergenceKind::kl();
  if (text == "reverse_kl") return DivergenceKind::reverse_kl();
  if (text == "hellinger") return DivergenceKind::hellinger();
  if (text.rfind("alpha:", 0) == 0) {
    try {
      return DivergenceKind::make_alpha(std::stod(text.substr(6)));
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::ParseError, "unknown divergence '" + text + "'");
}

// ---------------------------------------------------------------------------------------------
// Laplace approximation

namespace detail {

using Objective = std::function<double(const Vector&)>;

inline Vector fd_gradient(const Objective& f, const Vector& x, double rel_step) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(x(i)));
    Vector xp = x;
    Vector xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline Matrix fd_hessian(const Objective& f, const Vector& x, double rel_step) {
  const auto n = x.size();
  Matrix h(n, n);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hi = rel_step * (1.0 + std::abs(x(i)));
    Vector xp = x;
    Vector xm = x;
    xp(i) += hi;
    xm(i) -= hi;
    h(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (hi * hi);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double hj = rel_step * (1.0 + std::abs(x(j)));
      Vector pp = x;
      Vector pm = x;
      Vector mp = x;
      Vector mm = x;
      pp(i) += hi, pp(j) += hj;
      pm(i) += hi, pm(j) -= hj;
      mp(i) -= hi, mp(j) += hj;
      mm(i) -= hi, mm(j) -= hj;
      h(i, j) = h(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hi * hj);
    }
  }
  return h;
}

}  // namespace detail

/// Relative finite-difference step for gradients.
inline constexpr double kGradientStep = 1e-5;
/// Relative finite-difference step for Hessians; second differences need a wider step to
/// keep roundoff (≈ ε·f/h²) small.
inline constexpr double kHessianStep = 1e-4;
inline constexpr double kLaplaceGradTol = 1e-6;

struct LaplaceResult {
  GaussianModel model;
  Vector gradient;
  std::size_t iterations = 0;
};

/// Mode by damped Newton on −log p̃₀ = −2·log_sqrt, covariance from the inverse Hessian there.
inline LaplaceResult laplace_approx_detailed(const TargetDensity& target, const Vector& init,
                                             std::size_t max_newton = 100) {
  if (init.size() != target.dim) {
    fail(ErrorKind::DimensionMismatch, "initial point does not match target dimension");
  }
  const detail::Objective f = [&](const Vector& x) { return -2.0 * target.log_sqrt(x); };
  Vector x = init;
  double fx = f(x);
  Vector g = detail::fd_gradient(f, x, kGradientStep);
  std::size_t iter = 0;
  for (; iter < max_newton && g.norm() > kLaplaceGradTol; ++iter) {
    Matrix h = detail::fd_hessian(f, x, kHessianStep);
    h = 0.5 * (h + h.transpose());
    // Levenberg shift until the Newton system is positive definite.
    double shift = 0.0;
    Eigen::LLT<Matrix> llt(h);
    while (llt.info() != Eigen::Success) {
      shift = std::max(2.0 * shift, 1e-6 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff()));
      llt.compute(h + shift * Matrix::Identity(h.rows(), h.cols()));
      if (shift > 1e12) {
        fail(ErrorKind::IndefiniteHessian, "could not regularize the Newton system");
      }
    }
    const Vector dir = -llt.solve(g);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const Vector cand = x + t * dir;
      const double fc = f(cand);
      if (std::isfinite(fc) && fc <= fx + 1e-4 * t * g.dot(dir)) {
        x = cand;
        fx = fc;
        moved = true;
        break;
      }
    }
    g = detail::fd_gradient(f, x, kGradientStep);
    if (!moved) break;
  }
  if (!(g.norm() <= kLaplaceGradTol)) {
    fail(ErrorKind::NoConvergence, "gradient norm " + std::to_string(g.norm()) + " after Newton iterations");
  }
  Matrix h = detail::fd_hessian(f, x, kHessianStep);
  h = 0.5 * (h + h.transpose());
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::IndefiniteHessian, "log density is not concave at the mode");
  }
  const Matrix cov = llt.solve(Matrix::Identity(h.rows(), h.cols()));
  return {GaussianModel::from_covariance(x, 0.5 * (cov + cov.transpose())), g, iter};
}

inline GaussianModel laplace_approx(const TargetDensity& target, const Vector& init, std::size_t max_newton = 100) {
  return laplace_approx_detailed(target, init, max_newton).model;
}

// ---------------------------------------------------------------------------------------------
// One-dimensional divergences

/// Generalized KL ∫ p log(p/p2) − p + p2 by the trapezoid rule; zero densities are floored at 1e-300.
inline double kl_divergence_1d(const geometry::GridDensity& p, const geometry::GridDensity& p2) {
  geometry::validate_grid(p.grid, p.values.size());
  geometry::validate_grid(p2.grid, p2.values.size());
  geometry::require_same_grid(p.grid, p2.grid);
  std::vector<double> f(p.values.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::max(p.values[i], 1e-300);
    const double b = std::max(p2.values[i], 1e-300);
    f[i] = (p.values[i] > 0.0 ? p.values[i] * (std::log(a) - std::log(b)) : 0.0) - p.values[i] + p2.values[i];
  }
  return geometry::trapezoid(p.grid, f);
}

/// D_α(p‖p2); α = 0 and α = 1 dispatch to the KL limits.
inline double alpha_divergence_1d(const geometry::GridDensity& p, const geometry::GridDensity& p2, double alpha) {
  if (alpha == 0.0) return kl_divergence_1d(p2, p);
  if (alpha == 1.0) return kl_divergence_1d(p, p2);
  geometry::validate_grid(p.grid, p.values.size());
  geometry::validate_grid(p2.grid, p2.values.size());
  geometry::require_same_grid(p.grid, p2.grid);
  std::vector<double> f(p.values.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::max(p.values[i], 0.0);
    const double b = std::max(p2.values[i], 0.0);
    const double mixed = (a > 0.0 && b > 0.0) ? std::exp(alpha * std::log(a) + (1.0 - alpha) * std::log(b)) : 0.0;
    f[i] = alpha * a + (1.0 - alpha) * b - mixed;
  }
  return geometry::trapezoid(p.grid, f) / (alpha * (1.0 - alpha));
}

/// Grid for comparing `g` with `target`: g's μ ± 12σ, widened to the target's support if known.
inline std::vector<double> comparison_grid(const TargetDensity& target, const ScalarGaussian& g,
                                           std::size_t nodes = geometry::kDefaultGridNodes) {
  const double s = std::abs(g.sigma);
  double lo = g.mean - geometry::kDefaultGridHalfWidth * s;
  double hi = g.mean + geometry::kDefaultGridHalfWidth * s;
  if (target.support) {
    lo = std::min(lo, target.support->first);
    hi = std::max(hi, target.support->second);
  }
  return geometry::uniform_grid(lo, hi, nodes);
}

/// Divergence between a 1-D target (first argument) and N(μ, σ²).
inline double divergence_1d(const TargetDensity& target, const ScalarGaussian& g, const DivergenceKind& kind) {
  g.validate();
  if (kind.kind == DivergenceKind::Kind::Hellinger) {
    // 4H² = 4(1 − BC); the overlap only sees mass where the Gaussian has it.
    const auto grid = geometry::default_grid({g});
    const double bc = geometry::overlap_quadrature_1d(geometry::target_on_grid(target, grid),
                                                      geometry::gaussian_on_grid(g, grid));
    return 4.0 * (1.0 - bc);
  }
  const auto grid = comparison_grid(target, g);
  if (kind.kind == DivergenceKind::Kind::Alpha) {
    return alpha_divergence_1d(geometry::target_on_grid(target, grid), geometry::gaussian_on_grid(g, grid), kind.alpha);
  }
  // KL terms from log densities so that underflowed tails still contribute.
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lp = 2.0 * target.log_sqrt_1d(grid[i]);
    const double lq = 2.0 * scalar_log_sqrt_density(g, grid[i]);
    const double p = std::exp(lp);
    const double q = std::exp(lq);
    f[i] = (kind.kind == DivergenceKind::Kind::KL) ? q * (lq - lp) - q + p : p * (lp - lq) - p + q;
  }
  return geometry::trapezoid(grid, f);
}

struct DivergenceFit {
  ScalarGaussian fit;
  double divergence = 0.0;
  std::size_t evals = 0;
};

/// Nelder-Mead over (μ, log σ); the quadrature grid follows the current iterate.
inline DivergenceFit minimize_divergence_1d_detailed(const TargetDensity& target, const DivergenceKind& kind,
                                                     const ScalarGaussian& init) {
  if (target.dim != 1) {
    fail(ErrorKind::DimensionMismatch, "divergence minimization is one-dimensional");
  }
  init.validate();
  auto objective = [&](const Vector& x) -> double {
    const ScalarGaussian g{x(0), std::exp(x(1))};
    if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) return kInf;
    return divergence_1d(target, g, kind);
  };
  nm::Options opt;
  opt.max_evals = 2000;
  opt.x_tol = 1e-6;
  opt.initial_step = 0.5;
  Vector x(2);
  x << init.mean, std::log(std::abs(init.sigma));
  nm::Result r = nm::minimize(objective, x, opt);
  std::size_t evals = r.evals;
  // One restart from the incumbent guards against a collapsed initial simplex.
  if (r.converged) {
    opt.initial_step = 0.05;
    r = nm::minimize(objective, r.x, opt);
    evals += r.evals;
  }
  if (!r.converged) {
    fail(ErrorKind::NoConvergence, "simplex diameter " + std::to_string(r.diameter) + " after " +
                                       std::to_string(r.evals) + " evaluations");
  }
  return {{r.x(0), std::exp(r.x(1))}, r.fx, evals};
}

inline ScalarGaussian minimize_divergence_1d(const TargetDensity& target, const DivergenceKind& kind,
                                             const ScalarGaussian& init) {
  return minimize_divergence_1d_detailed(target, kind, init).fit;
}

}  // namespace gap::baselines

#endif
