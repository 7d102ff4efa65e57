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

#ifndef GAP_CONJUGATE_HPP
#define GAP_CONJUGATE_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "gap/error.hpp"
#include "gap/nelder_mead.hpp"
#include "gap/types.hpp"

/**
 * \file
 * \brief Normal-Gamma model for Gaussian data with unknown mean and precision.
 *
 * For a Normal-Gamma candidate p′ the overlap with the exact posterior p is, up to a
 * constant, g = √(β_N^{α_N}/Γ(α_N))·λ_N^{1/4}·Γ(α*)/(β*^{α*}·λ*^{1/2}), where the starred
 * parameters describe the Normal-Gamma density proportional to √(p·p′). Maximizing g over the
 * candidate recovers the conjugate posterior.
 */

namespace gap::conjugate {

struct NormalGammaParams {
  double mu = 0.0;
  double lambda = 1.0;
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const {
    if (!(lambda > 0.0 && alpha > 0.0 && beta > 0.0) || !std::isfinite(mu) || !std::isfinite(lambda) ||
        !std::isfinite(alpha) || !std::isfinite(beta)) {
      fail(ErrorKind::DomainError, "Normal-Gamma parameters need finite mu and positive lambda, alpha, beta");
    }
  }
};

/// n, x̄ and S = Σ(xᵢ − x̄)².
struct GaussianDataSummary {
  std::size_t n = 0;
  double xbar = 0.0;
  double s = 0.0;

  static GaussianDataSummary from_samples(std::span<const double> xs) {
    GaussianDataSummary out;
    out.n = xs.size();
    if (xs.empty()) return out;
    for (double x : xs) out.xbar += x;
    out.xbar /= static_cast<double>(xs.size());
    for (double x : xs) out.s += (x - out.xbar) * (x - out.xbar);
    return out;
  }

  void validate() const {
    if (!(s >= 0.0) || !std::isfinite(xbar) || (n <= 1 && s != 0.0)) {
      fail(ErrorKind::DomainError, "data summary needs S >= 0, and S = 0 when n <= 1");
    }
  }
};

inline double digamma(double x) {
  if (!(x > 0.0)) {
    fail(ErrorKind::DomainError, "digamma is evaluated only for positive arguments");
  }
  return boost::math::digamma(x);
}

inline NormalGammaParams ng_posterior(const NormalGammaParams& prior, const GaussianDataSummary& data) {
  prior.validate();
  data.validate();
  const double n = static_cast<double>(data.n);
  const double d = data.xbar - prior.mu;
  return {(n * data.xbar + prior.lambda * prior.mu) / (n + prior.lambda), prior.lambda + n, prior.alpha + n / 2.0,
          prior.beta + data.s / 2.0 + n * prior.lambda * d * d / (2.0 * (n + prior.lambda))};
}

inline NormalGammaParams ng_star_params(const NormalGammaParams& prior, const NormalGammaParams& cand,
                                        const GaussianDataSummary& data) {
  prior.validate();
  cand.validate();
  data.validate();
  const double n = static_cast<double>(data.n);
  const double k = n + prior.lambda + cand.lambda;
  const double q = n * prior.lambda * std::pow(data.xbar - prior.mu, 2) +
                   n * cand.lambda * std::pow(data.xbar - cand.mu, 2) +
                   prior.lambda * cand.lambda * std::pow(prior.mu - cand.mu, 2);
  return {(n * data.xbar + prior.lambda * prior.mu + cand.lambda * cand.mu) / k, k / 2.0,
          n / 4.0 + (prior.alpha + cand.alpha) / 2.0, data.s / 4.0 + (prior.beta + cand.beta) / 2.0 + q / (4.0 * k)};
}

inline double ng_log_g(const NormalGammaParams& prior, const NormalGammaParams& cand,
                       const GaussianDataSummary& data) {
  const NormalGammaParams star = ng_star_params(prior, cand, data);
  return cand.alpha / 2.0 * std::log(cand.beta) - 0.5 * std::lgamma(cand.alpha) + 0.25 * std::log(cand.lambda) +
         std::lgamma(star.alpha) - star.alpha * std::log(star.beta) - 0.5 * std::log(star.lambda);
}

/// ∂log g/∂(μ_N, λ_N, α_N, β_N) at `cand`; all four vanish at the conjugate posterior.
inline Vector ng_stationarity_residuals(const NormalGammaParams& prior, const NormalGammaParams& cand,
                                        const GaussianDataSummary& data) {
  const NormalGammaParams star = ng_star_params(prior, cand, data);
  const double n = static_cast<double>(data.n);
  const double k = n + prior.lambda + cand.lambda;
  const double lin = n * (cand.mu - data.xbar) + prior.lambda * (cand.mu - prior.mu);
  const double ratio = star.alpha / star.beta;
  Vector r(4);
  r(0) = -ratio * cand.lambda * lin / (2.0 * k);
  r(1) = 1.0 / (4.0 * cand.lambda) - 1.0 / (4.0 * star.lambda) - ratio * lin * lin / (4.0 * k * k);
  r(2) = 0.5 * (std::log(cand.beta) - digamma(cand.alpha) + digamma(star.alpha) - std::log(star.beta));
  r(3) = cand.alpha / (2.0 * cand.beta) - star.alpha / (2.0 * star.beta);
  return r;
}

/// Unconstrained coordinates (μ, log λ, log α, log β).
inline Vector to_unconstrained(const NormalGammaParams& p) {
  Vector x(4);
  x << p.mu, std::log(p.lambda), std::log(p.alpha), std::log(p.beta);
  return x;
}

inline NormalGammaParams from_unconstrained(const Vector& x) {
  return {x(0), std::exp(x(1)), std::exp(x(2)), std::exp(x(3))};
}

struct MaximizeResult {
  NormalGammaParams params;
  double log_g = 0.0;
  std::size_t evals = 0;
};

/// Maximizes log g by Nelder-Mead in unconstrained coordinates, restarting from the incumbent
/// with a fresh simplex until a restart no longer moves it.
inline MaximizeResult ng_maximize_log_g(const NormalGammaParams& prior, const GaussianDataSummary& data,
                                        const NormalGammaParams& start, int max_restarts = 8) {
  auto objective = [&](const Vector& x) -> double {
    const NormalGammaParams cand = from_unconstrained(x);
    if (!(cand.lambda > 0.0 && cand.alpha > 0.0 && cand.beta > 0.0) || !std::isfinite(cand.beta)) return kInf;
    return -ng_log_g(prior, cand, data);
  };
  nm::Options opt;
  opt.max_evals = 20'000;
  opt.x_tol = 1e-10;
  opt.initial_step = 0.5;
  Vector x = to_unconstrained(start);
  MaximizeResult out;
  for (int restart = 0; restart <= max_restarts; ++restart) {
    const nm::Result r = nm::minimize(objective, x, opt);
    out.evals += r.evals;
    const double moved = (r.x - x).lpNorm<Eigen::Infinity>();
    x = r.x;
    opt.initial_step = std::max(1e-3, 0.1 * opt.initial_step);
    if (r.converged && moved < 1e-9) break;
  }
  out.params = from_unconstrained(x);
  out.log_g = ng_log_g(prior, out.params, data);
  return out;
}

/// Largest relative parameter error; the mean, which may sit at zero, is scaled by max(|μ|, 1).
inline double max_relative_error(const NormalGammaParams& a, const NormalGammaParams& b) {
  auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };
  return std::max({std::abs(a.mu - b.mu) / std::max(std::abs(b.mu), 1.0), rel(a.lambda, b.lambda),
                   rel(a.alpha, b.alpha), rel(a.beta, b.beta)});
}

}  // namespace gap::conjugate

#endif
