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

#include <gtest/gtest.h>

#include "gap/baselines.hpp"
#include "gap/geometry.hpp"
#include "gap/targets.hpp"
#include "helpers.hpp"

namespace gap::baselines {
namespace {

using testing::throws_kind;

TargetDensity normal_target(double mean, double var) {
  return gaussian_target(GaussianModel::from_covariance(Vector::Constant(1, mean), Matrix::Constant(1, 1, var)));
}

TEST(Laplace, ExactOnGaussians) {
  const GaussianModel m = laplace_approx(normal_target(3.0, 2.0), Vector::Zero(1));
  EXPECT_NEAR(m.mean()(0), 3.0, 1e-6);
  EXPECT_NEAR(m.covariance()(0, 0), 2.0, 1e-6);

  std::mt19937_64 rng(1);
  const Matrix cov = testing::random_spd(rng, 3);
  const Vector mean = testing::random_vector(rng, 3);
  const GaussianModel fit = laplace_approx(gaussian_target(GaussianModel::from_covariance(mean, cov)), Vector::Zero(3));
  EXPECT_LT((fit.mean() - mean).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((fit.covariance() - cov).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Laplace, NearMixtureSeesOnlyTheDominantMode) {
  const GaussianModel m = laplace_approx(targets::mixture_target({{0.7, 0.3}, {0.0, 5.0}, {1.0, 1.0}}), Vector::Zero(1));
  EXPECT_NEAR(m.mean()(0), 0.0, 1e-3);
  EXPECT_NEAR(m.covariance()(0, 0), 1.0, 1e-2);
}

TEST(Laplace, LogisticModeMatchesAnalyticNewton) {
  const Vector beta = (Vector(3) << 0.5, -1.5, 1.0).finished();
  const auto data = targets::generate_logistic_data(100, beta, 0.7, 2024, Vector::Zero(3), 100.0 * Matrix::Identity(3, 3));
  const LaplaceResult r = laplace_approx_detailed(targets::logistic_posterior_target(data), Vector::Zero(3));
  EXPECT_LT(r.gradient.norm(), 1e-6);

  const Matrix prior_prec = data.prior_cov.inverse();
  Vector b = Vector::Zero(3);
  Matrix h;
  for (int it = 0; it < 50; ++it) {
    Vector g = -prior_prec * (b - data.prior_mean);
    h = prior_prec;
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
      const double p = targets::sigmoid(data.x.row(i).dot(b));
      g += data.x.row(i).transpose() * (data.y(i) - p);
      h += p * (1.0 - p) * data.x.row(i).transpose() * data.x.row(i);
    }
    b += h.llt().solve(g);
  }
  EXPECT_LT((r.model.mean() - b).norm(), 1e-5);
  EXPECT_LT((r.model.covariance() - h.inverse()).norm() / h.inverse().norm(), 1e-4);
}

TEST(Laplace, Failures) {
  TargetDensity bowl;
  bowl.dim = 1;
  bowl.log_sqrt = [](const ConstVectorRef& z) { return z(0) * z(0); };
  EXPECT_TRUE(throws_kind(ErrorKind::IndefiniteHessian, [&] { (void)laplace_approx(bowl, Vector::Zero(1)); }));
  TargetDensity ramp;
  ramp.dim = 1;
  ramp.log_sqrt = [](const ConstVectorRef& z) { return z(0); };
  EXPECT_TRUE(throws_kind(ErrorKind::NoConvergence, [&] { (void)laplace_approx(ramp, Vector::Zero(1), 5); }));
  EXPECT_TRUE(throws_kind(ErrorKind::DimensionMismatch,
                          [&] { (void)laplace_approx(targets::student_t1_target(), Vector::Zero(2)); }));
}

TEST(AlphaDivergence, IdentityAndHellingerRelation) {
  const auto grid = geometry::default_grid({{0.0, 1.0}, {1.0, 1.5}});
  const auto p = geometry::gaussian_on_grid({0.0, 1.0}, grid);
  const auto p2 = geometry::gaussian_on_grid({1.0, 1.5}, grid);
  for (double a : {0.0, 0.2, 0.5, 0.9, 1.0}) EXPECT_NEAR(alpha_divergence_1d(p, p, a), 0.0, 1e-12);
  const double bc = geometry::overlap_quadrature_1d(p, p2);
  EXPECT_NEAR(alpha_divergence_1d(p, p2, 0.5), 4.0 * (1.0 - bc), 1e-8);
}

TEST(AlphaDivergence, UnitShift) {
  const auto grid = geometry::default_grid({{0.0, 1.0}, {1.0, 1.0}});
  const double d = alpha_divergence_1d(geometry::gaussian_on_grid({0.0, 1.0}, grid),
                                       geometry::gaussian_on_grid({1.0, 1.0}, grid), 0.5);
  EXPECT_NEAR(d, 4.0 * (1.0 - std::exp(-0.125)), 1e-8);
  EXPECT_NEAR(d, 0.4700, 1e-4);
}

TEST(KlDivergence, ClosedForm) {
  // KL(N(0,1) ‖ N(1,4)) = log 2 + (1 + 1)/8 − ½
  const auto grid = geometry::default_grid({{0.0, 1.0}, {1.0, 2.0}});
  const auto p = geometry::gaussian_on_grid({0.0, 1.0}, grid);
  const auto p2 = geometry::gaussian_on_grid({1.0, 2.0}, grid);
  const double exact = std::log(2.0) + 2.0 / 8.0 - 0.5;
  EXPECT_NEAR(kl_divergence_1d(p, p2), exact, 1e-8);
  EXPECT_NEAR(alpha_divergence_1d(p2, p, 0.0), exact, 1e-8);
  EXPECT_NEAR(alpha_divergence_1d(p, p2, 1.0), exact, 1e-8);
  const TargetDensity t = normal_target(0.0, 1.0);
  EXPECT_NEAR(divergence_1d(t, {1.0, 2.0}, DivergenceKind::reverse_kl()), exact, 1e-8);
  EXPECT_NEAR(divergence_1d(normal_target(1.0, 4.0), {0.0, 1.0}, DivergenceKind::kl()), exact, 1e-8);
}

TEST(Minimize, RecoversGaussianTargets) {
  const TargetDensity t = normal_target(3.0, 2.0);
  for (const auto& kind : {DivergenceKind::hellinger(), DivergenceKind::kl(), DivergenceKind::reverse_kl(),
                           DivergenceKind::make_alpha(0.3)}) {
    const ScalarGaussian fit = minimize_divergence_1d(t, kind, {0.0, 1.0});
    EXPECT_NEAR(fit.mean, 3.0, 1e-4) << kind.name();
    EXPECT_NEAR(fit.variance(), 2.0, 1e-4) << kind.name();
  }
}

TEST(Minimize, CauchyHellinger) {
  const auto fit = minimize_divergence_1d_detailed(targets::student_t1_target(), DivergenceKind::hellinger(), {1.0, 1.0});
  EXPECT_NEAR(fit.fit.mean, 0.0, 1e-4);
  EXPECT_NEAR(fit.fit.sigma, 1.94184, 1e-4);
}

TEST(Minimize, NearMixtureCoversBothModes) {
  const TargetDensity t = targets::mixture_target({{0.7, 0.3}, {0.0, 5.0}, {1.0, 1.0}});
  const ScalarGaussian h = minimize_divergence_1d(t, DivergenceKind::hellinger(), {2.0, 1.0});
  EXPECT_NEAR(h.mean, 1.51830, 1e-4);
  EXPECT_NEAR(h.variance(), 5.76386, 1e-3);
  EXPECT_GT(h.variance(), 4.0);
  const GaussianModel lap = laplace_approx(t, Vector::Zero(1));
  EXPECT_LT(lap.covariance()(0, 0), 2.0);
}

TEST(Minimize, FarMixture) {
  const TargetDensity t = targets::mixture_target({{0.9, 0.1}, {0.0, 15.0}, {1.0, 1.0}});
  const ScalarGaussian h = minimize_divergence_1d(t, DivergenceKind::hellinger(), {2.0, 2.0});
  const ScalarGaussian r = minimize_divergence_1d(t, DivergenceKind::reverse_kl(), {2.0, 2.0});
  EXPECT_NEAR(h.mean, 0.0, 1e-3);
  EXPECT_NEAR(h.variance(), 1.0, 1e-3);
  EXPECT_NEAR(r.mean, 1.5, 1e-3);
  EXPECT_NEAR(r.variance(), 21.25, 1e-2);
  EXPECT_LT(h.mean, 3.0);
  EXPECT_GT(r.mean, 1.0);
  EXPECT_GT(r.variance(), h.variance());
}

TEST(Minimize, RejectsMultivariateTargets) {
  const TargetDensity t = gaussian_target(GaussianModel(Vector::Zero(2), Matrix::Identity(2, 2)));
  EXPECT_TRUE(throws_kind(ErrorKind::DimensionMismatch,
                          [&] { (void)minimize_divergence_1d(t, DivergenceKind::kl(), {0.0, 1.0}); }));
}

TEST(DivergenceKind, Parsing) {
  EXPECT_EQ(parse_divergence("kl").kind, DivergenceKind::Kind::KL);
  EXPECT_EQ(parse_divergence("reverse_kl").kind, DivergenceKind::Kind::ReverseKL);
  EXPECT_EQ(parse_divergence("hellinger").name(), "hellinger");
  EXPECT_EQ(parse_divergence("alpha:0.25").alpha, 0.25);
  EXPECT_EQ(parse_divergence("alpha:0.25").name(), "alpha_0.25");
  EXPECT_TRUE(throws_kind(ErrorKind::ParseError, [] { (void)parse_divergence("alpha:x"); }));
  EXPECT_TRUE(throws_kind(ErrorKind::ParseError, [] { (void)parse_divergence("tv"); }));
}

}  // namespace
}  // namespace gap::baselines
