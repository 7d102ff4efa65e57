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


#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gap/conjugate.hpp"
#include "helpers.hpp"

namespace gap::conjugate {
namespace {

using testing::throws_kind;

double log_ng_density(const NormalGammaParams& p, double mu, double tau) {
  return p.alpha * std::log(p.beta) - std::lgamma(p.alpha) + 0.5 * std::log(p.lambda / (2.0 * std::numbers::pi)) +
         (p.alpha - 0.5) * std::log(tau) - p.beta * tau - 0.5 * p.lambda * tau * (mu - p.mu) * (mu - p.mu);
}

double log_likelihood(const std::vector<double>& xs, double mu, double tau) {
  double out = 0.0;
  for (double x : xs) out += 0.5 * std::log(tau / (2.0 * std::numbers::pi)) - 0.5 * tau * (x - mu) * (x - mu);
  return out;
}

/// log ∫∫ exp(f(μ, τ)) dμ dτ on a (μ, log τ) grid.
template <class F>
double log_integral_2d(F f, double mu_lo, double mu_hi, double u_lo, double u_hi, int nodes) {
  const double hm = (mu_hi - mu_lo) / (nodes - 1);
  const double hu = (u_hi - u_lo) / (nodes - 1);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes));
  double best = -kInf;
  for (int i = 0; i < nodes; ++i) {
    const double u = u_lo + hu * i;
    for (int j = 0; j < nodes; ++j) {
      const double mu = mu_lo + hm * j;
      const double wi = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
      const double wj = (j == 0 || j == nodes - 1) ? 0.5 : 1.0;
      const double v = f(mu, std::exp(u)) + u + std::log(wi * wj);
      vals.push_back(v);
      best = std::max(best, v);
    }
  }
  double sum = 0.0;
  for (double v : vals) sum += std::exp(v - best);
  return best + std::log(sum * hm * hu);
}

struct Instance {
  NormalGammaParams prior;
  std::vector<double> xs;
  GaussianDataSummary data;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance inst;
  inst.prior = {-1.0 + 2.0 * u(rng), 0.5 + 2.0 * u(rng), 1.0 + 2.0 * u(rng), 0.5 + 2.0 * u(rng)};
  std::normal_distribution<double> x(0.5, 1.0);
  for (std::size_t i = 0; i < n; ++i) inst.xs.push_back(x(rng));
  inst.data = GaussianDataSummary::from_samples(inst.xs);
  return inst;
}

TEST(Posterior, NoDataIsThePrior) {
  const NormalGammaParams prior{0.3, 2.0, 1.5, 0.7};
  const auto post = ng_posterior(prior, {});
  EXPECT_EQ(post.mu, prior.mu);
  EXPECT_EQ(post.lambda, prior.lambda);
  EXPECT_EQ(post.alpha, prior.alpha);
  EXPECT_EQ(post.beta, prior.beta);
}

TEST(Posterior, WorkedExample) {
  const auto post = ng_posterior({0.0, 1.0, 1.0, 1.0}, {3, 2.0, 0.0});
  EXPECT_DOUBLE_EQ(post.mu, 1.5);
  EXPECT_DOUBLE_EQ(post.lambda, 4.0);
  EXPECT_DOUBLE_EQ(post.alpha, 2.5);
  EXPECT_DOUBLE_EQ(post.beta, 2.5);
}

TEST(Posterior, MatchesSequentialUpdates) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, 1 + static_cast<std::size_t>(trial) * 3);
    NormalGammaParams seq = inst.prior;
    for (double x : inst.xs) seq = ng_posterior(seq, {1, x, 0.0});
    const auto batch = ng_posterior(inst.prior, inst.data);
    EXPECT_NEAR(seq.mu, batch.mu, 1e-12);
    EXPECT_NEAR(seq.lambda, batch.lambda, 1e-12);
    EXPECT_NEAR(seq.alpha, batch.alpha, 1e-12);
    EXPECT_NEAR(seq.beta, batch.beta, 1e-10);
  }
}

TEST(Posterior, Validation) {
  EXPECT_TRUE(throws_kind(ErrorKind::DomainError, [] { (void)ng_posterior({0.0, -1.0, 1.0, 1.0}, {}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::DomainError, [] { (void)ng_posterior({0.0, 1.0, 1.0, 1.0}, {1, 0.0, 2.0}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::DomainError, [] { (void)ng_posterior({0.0, 1.0, 1.0, 1.0}, {5, 0.0, -1.0}); }));
}

TEST(StarParams, Examples) {
  const NormalGammaParams unit{0.0, 1.0, 1.0, 1.0};
  const auto star = ng_star_params(unit, unit, {});
  EXPECT_DOUBLE_EQ(star.mu, 0.0);
  EXPECT_DOUBLE_EQ(star.lambda, 1.0);
  EXPECT_DOUBLE_EQ(star.alpha, 1.0);
  EXPECT_DOUBLE_EQ(star.beta, 1.0);
  const GaussianDataSummary data{3, 2.0, 0.0};
  EXPECT_DOUBLE_EQ(ng_star_params(unit, ng_posterior(unit, data), data).lambda, 4.0);
}

// log g must equal log ∫∫ √(p′·prior·likelihood) up to a constant that does not depend on p′.
TEST(LogG, MatchesQuadratureUpToAConstant) {
  std::mt19937_64 rng(2);
  const Instance inst = random_instance(rng, 6);
  const auto post = ng_posterior(inst.prior, inst.data);
  std::uniform_real_distribution<double> jitter(0.7, 1.4);
  double offset = 0.0;
  for (int k = 0; k < 6; ++k) {
    const NormalGammaParams cand = k == 0 ? post
                                          : NormalGammaParams{post.mu + (jitter(rng) - 1.0), post.lambda * jitter(rng),
                                                              post.alpha * jitter(rng), post.beta * jitter(rng)};
    const double quad = log_integral_2d(
        [&](double mu, double tau) {
          return 0.5 * (log_ng_density(cand, mu, tau) + log_ng_density(inst.prior, mu, tau) +
                        log_likelihood(inst.xs, mu, tau));
        },
        post.mu - 12.0, post.mu + 12.0, -14.0, 5.0, 1201);
    const double diff = quad - ng_log_g(inst.prior, cand, inst.data);
    if (k == 0) {
      offset = diff;
    } else {
      EXPECT_NEAR(diff, offset, 1e-6) << k;
    }
  }
}

TEST(LogG, HigherMeansCloser) {
  std::mt19937_64 rng(3);
  const Instance inst = random_instance(rng, 4);
  const auto post = ng_posterior(inst.prior, inst.data);
  const double log_evidence = log_integral_2d(
      [&](double mu, double tau) { return log_ng_density(inst.prior, mu, tau) + log_likelihood(inst.xs, mu, tau); },
      post.mu - 12.0, post.mu + 12.0, -14.0, 5.0, 601);
  auto distance = [&](const NormalGammaParams& cand) {
    const double log_overlap = log_integral_2d(
        [&](double mu, double tau) {
          return 0.5 * (log_ng_density(cand, mu, tau) + log_ng_density(inst.prior, mu, tau) +
                        log_likelihood(inst.xs, mu, tau) - log_evidence);
        },
        post.mu - 12.0, post.mu + 12.0, -14.0, 5.0, 601);
    return std::acos(std::min(1.0, std::exp(log_overlap)));
  };
  std::uniform_real_distribution<double> jitter(0.5, 2.0);
  auto random_cand = [&] {
    return NormalGammaParams{post.mu + (jitter(rng) - 1.0), post.lambda * jitter(rng), post.alpha * jitter(rng),
                             post.beta * jitter(rng)};
  };
  for (int pair = 0; pair < 20; ++pair) {
    const auto c1 = random_cand();
    const auto c2 = random_cand();
    const bool g_higher = ng_log_g(inst.prior, c1, inst.data) > ng_log_g(inst.prior, c2, inst.data);
    EXPECT_EQ(g_higher, distance(c1) < distance(c2)) << pair;
  }
}

TEST(Stationarity, ResidualsVanishAtThePosterior) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, static_cast<std::size_t>(trial) * 4);
    const auto post = ng_posterior(inst.prior, inst.data);
    EXPECT_LT(ng_stationarity_residuals(inst.prior, post, inst.data).cwiseAbs().maxCoeff(), 1e-10);
    // finite differences of log g agree
    const Vector x = to_unconstrained(post);
    const double h = 1e-5;
    for (Eigen::Index k = 0; k < 4; ++k) {
      Vector up = x;
      Vector dn = x;
      up(k) += h;
      dn(k) -= h;
      const double fd = (ng_log_g(inst.prior, from_unconstrained(up), inst.data) -
                         ng_log_g(inst.prior, from_unconstrained(dn), inst.data)) /
                        (2.0 * h);
      EXPECT_LT(std::abs(fd), 1e-8);
    }
  }
}

TEST(Stationarity, PerturbedMeanHasMatchingSign) {
  std::mt19937_64 rng(5);
  const Instance inst = random_instance(rng, 5);
  auto cand = ng_posterior(inst.prior, inst.data);
  cand.mu += 0.1;
  const Vector r = ng_stationarity_residuals(inst.prior, cand, inst.data);
  EXPECT_GT(std::abs(r(0)), 1e-4);
  const double h = 1e-6;
  auto up = cand;
  auto dn = cand;
  up.mu += h;
  dn.mu -= h;
  const double fd = (ng_log_g(inst.prior, up, inst.data) - ng_log_g(inst.prior, dn, inst.data)) / (2.0 * h);
  EXPECT_NEAR(r(0), fd, 1e-6);
  EXPECT_LT(r(0), 0.0);
  for (Eigen::Index k = 1; k < 4; ++k) {
    auto p = cand;
    auto m = cand;
    double* fp = k == 1 ? &p.lambda : (k == 2 ? &p.alpha : &p.beta);
    double* fm = k == 1 ? &m.lambda : (k == 2 ? &m.alpha : &m.beta);
    *fp += h;
    *fm -= h;
    EXPECT_NEAR(r(k), (ng_log_g(inst.prior, p, inst.data) - ng_log_g(inst.prior, m, inst.data)) / (2.0 * h), 1e-6);
  }
}

TEST(Maximize, RecoversThePosterior) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> jitter(0.6, 1.6);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance inst = random_instance(rng, static_cast<std::size_t>(trial) * 2);
    const auto post = ng_posterior(inst.prior, inst.data);
    const NormalGammaParams start{post.mu + 0.5, post.lambda * jitter(rng), post.alpha * jitter(rng),
                                  post.beta * jitter(rng)};
    const auto fit = ng_maximize_log_g(inst.prior, inst.data, start);
    EXPECT_LT(max_relative_error(fit.params, post), 1e-5) << trial;
    EXPECT_GE(fit.log_g, ng_log_g(inst.prior, start, inst.data));
  }
}

TEST(Digamma, ReferenceValues) {
  EXPECT_NEAR(digamma(1.0), -0.5772156649015329, 1e-14);
  for (double x : {0.3, 1.0, 2.5, 10.0}) EXPECT_NEAR(digamma(x + 1.0), digamma(x) + 1.0 / x, 1e-13);
  EXPECT_TRUE(throws_kind(ErrorKind::DomainError, [] { (void)digamma(0.0); }));
}

TEST(Transform, RoundTrip) {
  const NormalGammaParams p{-0.4, 2.0, 3.0, 0.25};
  const auto back = from_unconstrained(to_unconstrained(p));
  EXPECT_DOUBLE_EQ(back.mu, p.mu);
  EXPECT_NEAR(back.lambda, p.lambda, 1e-15);
  EXPECT_NEAR(back.alpha, p.alpha, 1e-15);
  EXPECT_NEAR(back.beta, p.beta, 1e-15);
}

}  // namespace
}  // namespace gap::conjugate
