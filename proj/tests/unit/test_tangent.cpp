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
#include <functional>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "gap/matops.hpp"
#include "gap/random.hpp"
#include "gap/tangent.hpp"
#include "helpers.hpp"

namespace gap::tangent {
namespace {

using testing::throws_kind;

/// Entrywise mean and standard error of f(z) f(z)ᵀ under z ~ model.
struct OuterMoments {
  Matrix mean;
  Matrix se;
};

OuterMoments mc_outer(const GaussianModel& model, const std::function<Vector(const Vector&)>& f, std::size_t n,
                      std::uint64_t seed) {
  const auto d = model.dim();
  Matrix sum;
  Matrix sum_sq;
  for (std::size_t t = 0; t < n; ++t) {
    Vector xi(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      xi(k) = random::standard_normal(seed, random::Stream::Test, t, static_cast<std::uint32_t>(k));
    }
    const Vector z = model.mean() + model.chol() * xi;
    const Vector v = f(z);
    const Matrix prod = v * v.transpose();
    if (t == 0) {
      sum = Matrix::Zero(prod.rows(), prod.cols());
      sum_sq = sum;
    }
    sum += prod;
    sum_sq += prod.cwiseProduct(prod);
  }
  const double nn = static_cast<double>(n);
  OuterMoments out;
  out.mean = sum / nn;
  out.se = ((sum_sq / nn - out.mean.cwiseProduct(out.mean)) / (nn - 1.0)).cwiseMax(0.0).cwiseSqrt();
  return out;
}

/// Entrywise 3 SE check, Bonferroni-corrected over the distinct entries of the symmetric matrix so
/// that the whole matrix has the false-alarm rate of one 3 SE comparison.
void expect_within_3se(const Matrix& exact, const OuterMoments& mc) {
  ASSERT_EQ(exact.rows(), mc.mean.rows());
  const auto n = static_cast<double>(exact.rows());
  const double family_alpha = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), 3.0));
  const double z = boost::math::quantile(boost::math::complement(boost::math::normal(), family_alpha / (n * (n + 1.0))));
  for (Eigen::Index i = 0; i < exact.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      EXPECT_LE(std::abs(mc.mean(i, j) - exact(i, j)), z * mc.se(i, j) + 1e-12)
          << "entry " << i << "," << j << " exact " << exact(i, j) << " mc " << mc.mean(i, j) << " threshold " << z
          << " SE";
    }
  }
}

GaussianModel random_model(std::mt19937_64& rng, Eigen::Index d) {
  return GaussianModel::from_covariance(testing::random_vector(rng, d), testing::random_spd(rng, d));
}

TEST(MeanBlock, Examples) {
  EXPECT_NEAR(gram_mean_block(ScalarGaussian{0.0, 1.0}.to_model())(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(gram_mean_block(ScalarGaussian{0.0, 2.0}.to_model())(0, 0), 1.0 / 16.0, 1e-15);
}

TEST(MeanBlock, MatchesMonteCarloInThreeDimensions) {
  std::mt19937_64 rng(1);
  const GaussianModel m = random_model(rng, 3);
  const Matrix prec = m.precision();
  const auto mc = mc_outer(m, [&](const Vector& z) { return Vector(0.5 * prec * (z - m.mean())); }, 1'000'000, 3);
  expect_within_3se(gram_mean_block(m), mc);
}

TEST(Operators, ScalarCase) {
  const GaussianModel m = ScalarGaussian{0.0, 1.7}.to_model();
  const auto [u, v] = build_uv(m, matops::build_operator_matrices(1));
  EXPECT_EQ(u, Matrix::Identity(1, 1));
  EXPECT_NEAR(v(0, 0), 2.0 * 1.7, 1e-15);
}

TEST(Operators, VIsTheDifferentialOfSigma) {
  std::mt19937_64 rng(2);
  for (Eigen::Index d : {2, 3}) {
    const GaussianModel m = d == 2 ? GaussianModel(Vector::Zero(2), Matrix::Identity(2, 2)) : random_model(rng, d);
    const auto ops = matops::build_operator_matrices(d);
    const Matrix v = build_v_dense(m, ops);
    EXPECT_TRUE(v.isApprox(build_v_indexed(m), 1e-14));
    const Vector l0 = m.vech_chol();
    const double h = 1e-6;
    for (Eigen::Index k = 0; k < l0.size(); ++k) {
      Vector up = l0;
      Vector dn = l0;
      up(k) += h;
      dn(k) -= h;
      const Matrix fd = (GaussianModel::from_vech(m.mean(), up).covariance() -
                         GaussianModel::from_vech(m.mean(), dn).covariance()) / (2.0 * h);
      EXPECT_LT((matops::vec(fd) - v.col(k)).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Operators, UOnSymmetricMatrices) {
  std::mt19937_64 rng(3);
  const auto ops = matops::build_operator_matrices(2);
  const Matrix u = build_u(ops);
  const Matrix a = testing::random_spd(rng, 2);
  const Matrix diag = a.diagonal().asDiagonal();
  EXPECT_TRUE((u * matops::vec(a)).isApprox(2.0 * matops::vec(a) - matops::vec(diag), 1e-14));
  const auto big = matops::build_operator_matrices(matops::kDenseOperatorLimit + 1);
  const auto d = big.dim;
  const Matrix s = testing::random_spd(rng, d);
  const Matrix sd = s.diagonal().asDiagonal();
  EXPECT_TRUE((build_u(big) * matops::vec(s)).isApprox(2.0 * matops::vec(s) - matops::vec(sd), 1e-12));
}

TEST(Operators, DimensionMismatch) {
  EXPECT_TRUE(throws_kind(ErrorKind::DimensionMismatch,
                          [] { (void)build_uv(ScalarGaussian{}.to_model(), matops::build_operator_matrices(2)); }));
}

TEST(ExpectedWtW, ScalarCase) {
  EXPECT_NEAR(expected_wtw(ScalarGaussian{0.0, 1.0}.to_model())(0, 0), 1.0 / 8.0, 1e-15);
  EXPECT_NEAR(expected_wtw(ScalarGaussian{2.0, 3.0}.to_model())(0, 0), 1.0 / (8.0 * 81.0), 1e-15);
}

TEST(ExpectedWtW, MatchesMonteCarlo) {
  std::mt19937_64 rng(4);
  for (Eigen::Index d : {2, 3}) {
    const GaussianModel m = d == 2 ? GaussianModel(Vector::Zero(2), Matrix::Identity(2, 2)) : random_model(rng, d);
    const Matrix prec = m.precision();
    const auto mc = mc_outer(
        m,
        [&](const Vector& z) {
          const Vector y = prec * (z - m.mean());
          return Vector(0.25 * matops::vec(y * y.transpose() - prec));
        },
        1'000'000, 5 + static_cast<std::uint64_t>(d));
    const Matrix exact = expected_wtw(m);
    expect_within_3se(exact, mc);
    EXPECT_TRUE(exact.isApprox(exact.transpose(), 1e-14));
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(exact).eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(CovBlock, ScalarClosedForm) {
  for (double s : {0.5, 1.0, 3.0}) {
    const Matrix b = gram_cov_block(ScalarGaussian{0.0, s}.to_model(), matops::build_operator_matrices(1));
    EXPECT_NEAR(b(0, 0), 1.0 / (2.0 * s * s), 1e-14);
  }
}

TEST(CovBlock, MatchesMonteCarloGramOfTangentVectors) {
  std::mt19937_64 rng(6);
  for (Eigen::Index d : {1, 2, 3}) {
    const GaussianModel m = d == 2 ? GaussianModel(Vector::Zero(2), Matrix::Identity(2, 2)) : random_model(rng, d);
    const TangentGram gram = build_tangent_gram(m, matops::build_operator_matrices(d));
    const auto mc = mc_outer(
        m, [&](const Vector& z) { return cov_direction_row(gram, gram.precision * (z - m.mean())); }, 1'000'000,
        20 + static_cast<std::uint64_t>(d));
    expect_within_3se(gram.b, mc);
    EXPECT_LT((gram.b - gram.b.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(CovBlock, CrossBlockIsOrthogonal) {
  std::mt19937_64 rng(7);
  const GaussianModel m = random_model(rng, 2);
  const TangentGram gram = build_tangent_gram(m, matops::build_operator_matrices(2));
  const auto mc = mc_outer(
      m,
      [&](const Vector& z) {
        const Vector y = gram.precision * (z - m.mean());
        Vector both(2 + gram.b.rows());
        both << 0.5 * y, cov_direction_row(gram, y);
        return both;
      },
      1'000'000, 31);
  const auto n = 2 + gram.b.rows();
  Matrix exact = Matrix::Zero(n, n);
  exact.topLeftCorner(2, 2) = gram.a;
  exact.bottomRightCorner(gram.b.rows(), gram.b.rows()) = gram.b;
  expect_within_3se(exact, mc);
}

TEST(TangentVectors, ContractWithSymmetricGradient) {
  // Row k is vec(W)ᵀ·U·vec(∂Σ/∂l_k): off-diagonal entries of the symmetric gradient count twice.
  std::mt19937_64 rng(8);
  for (Eigen::Index d : {1, 2, 3}) {
    const GaussianModel m = random_model(rng, d);
    const TangentGram gram = build_tangent_gram(m, matops::build_operator_matrices(d));
    const Vector z = m.mean() + testing::random_vector(rng, d);
    const Vector y = gram.precision * (z - m.mean());
    const Vector analytic = cov_direction_row(gram, y);
    const Matrix w = 0.25 * (y * y.transpose() - gram.precision);
    const Vector l0 = m.vech_chol();
    const double h = 1e-6;
    for (Eigen::Index k = 0; k < l0.size(); ++k) {
      Vector up = l0;
      Vector dn = l0;
      up(k) += h;
      dn(k) -= h;
      const Matrix dsigma = (GaussianModel::from_vech(m.mean(), up).covariance() -
                             GaussianModel::from_vech(m.mean(), dn).covariance()) / (2.0 * h);
      const Matrix sym = 2.0 * dsigma - Matrix(dsigma.diagonal().asDiagonal());
      EXPECT_NEAR(analytic(k), w.cwiseProduct(sym).sum(), 1e-7);
      if (d == 1) {
        const double fd = (gaussian_log_sqrt_density(GaussianModel::from_vech(m.mean(), up), z) -
                           gaussian_log_sqrt_density(GaussianModel::from_vech(m.mean(), dn), z)) /
                          (2.0 * h);
        EXPECT_NEAR(analytic(k), fd, 1e-7);
      }
    }
  }
}

TEST(TangentVectors, SpanThePushForwardOfL) {
  // U·V = V·K for an invertible K, so the basis spans the same tangent space as ∂q/∂l.
  std::mt19937_64 rng(10);
  for (Eigen::Index d : {2, 3, 4}) {
    const GaussianModel m = random_model(rng, d);
    const auto [u, v] = build_uv(m, matops::build_operator_matrices(d));
    const Matrix k = v.colPivHouseholderQr().solve(u * v);
    EXPECT_LT((v * k - u * v).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(k.colPivHouseholderQr().rank(), k.rows());
  }
}

TEST(Coefficients, Examples) {
  const TangentGram g1 = build_tangent_gram(ScalarGaussian{0.0, 1.0}.to_model(), matops::build_operator_matrices(1));
  EXPECT_NEAR(g1.coeff_mu(0, 0), 2.0, 1e-15);
  TangentGram id;
  id.a = Matrix::Identity(3, 3);
  id.b = Matrix::Identity(2, 2);
  const TangentGram out = orthonormal_coefficients(id);
  EXPECT_EQ(out.coeff_mu, Matrix::Identity(3, 3));
  std::mt19937_64 rng(9);
  for (Eigen::Index d : {2, 3, 4}) {
    const TangentGram g = build_tangent_gram(random_model(rng, d), matops::build_operator_matrices(d));
    const auto md = g.a.rows();
    const auto mb = g.b.rows();
    EXPECT_LT((g.coeff_mu * g.a * g.coeff_mu.transpose() - Matrix::Identity(md, md)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((g.coeff_l * g.b * g.coeff_l.transpose() - Matrix::Identity(mb, mb)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

}  // namespace
}  // namespace gap::tangent
