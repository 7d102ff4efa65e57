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

#ifndef GAP_TANGENT_HPP
#define GAP_TANGENT_HPP

#include <utility>

#include <Eigen/Dense>

#include "gap/error.hpp"
#include "gap/matops.hpp"
#include "gap/types.hpp"

/**
 * \file
 * \brief Tangent space of the Gaussian family at θ = (μ, L).
 *
 * Basis push-forwards, for y = Σ⁻¹(z − μ):
 *
 *     v_μ(z) = q(z)·½·y
 *     v_l(z) = q(z)·W(z)·U·V,   W(z) = ¼(vec(yyᵀ) − vec(Σ⁻¹))ᵀ
 *
 * with U = I + T − R turning the unstructured Σ-derivative into the symmetric one and
 * V = [(I⊗L)T + (L⊗I)]Sᵀ the Jacobian of vec(LLᵀ) with respect to vech(L). Inner products are
 * L² inner products, i.e. expectations under q².
 */

namespace gap::tangent {

/// Gram matrices of the two basis blocks and their orthonormalization coefficients.
struct TangentGram {
  Matrix a;         ///< D×D, ¼Σ⁻¹
  Matrix b;         ///< m×m
  Matrix u;         ///< D²×D²
  Matrix v;         ///< D²×m
  Matrix coeff_mu;  ///< lower-triangular, coeff_mu·a·coeff_muᵀ = I
  Matrix coeff_l;   ///< lower-triangular, coeff_l·b·coeff_lᵀ = I
  Matrix precision; ///< Σ⁻¹ at the model, reused by the estimators
  Matrix uv;        ///< U·V, the per-sample map from W(z) to the v_l coordinates
};

/// ¼Σ⁻¹.
inline Matrix gram_mean_block(const GaussianModel& model) { return 0.25 * model.precision(); }

/// V from the Kronecker expression, using the dense operators.
inline Matrix build_v_dense(const GaussianModel& model, const matops::OperatorMatrices& ops) {
  const auto d = model.dim();
  const Matrix eye = Matrix::Identity(d, d);
  return (matops::kron(eye, model.chol()) * (*ops.t_dd) + matops::kron(model.chol(), eye)) * ops.s_d->transpose();
}

/// V column by column: the column for vech entry (i, j) is vec(E_ij·Lᵀ + L·E_ji).
/// Row i of E_ij·Lᵀ and column i of L·E_ji both equal column j of L.
inline Matrix build_v_indexed(const GaussianModel& model) {
  const auto d = model.dim();
  const Matrix& l = model.chol();
  Matrix v = Matrix::Zero(d * d, d * (d + 1) / 2);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j; i < d; ++i) {
      Matrix dsigma = Matrix::Zero(d, d);
      dsigma.row(i) += l.col(j).transpose();
      dsigma.col(i) += l.col(j);
      v.col(col++) = matops::vec(dsigma);
    }
  }
  return v;
}

/// U = I + T − R.
inline Matrix build_u(const matops::OperatorMatrices& ops) {
  const auto n2 = ops.dim * ops.dim;
  if (ops.has_dense()) {
    return Matrix::Identity(n2, n2) + *ops.t_dd - *ops.r_d;
  }
  Matrix u = Matrix::Identity(n2, n2);
  for (Eigen::Index k = 0; k < n2; ++k) {
    u(k, ops.transpose_index[static_cast<std::size_t>(k)]) += 1.0;
  }
  for (auto k : ops.diagonal_index) {
    u(k, k) -= 1.0;
  }
  return u;
}

inline std::pair<Matrix, Matrix> build_uv(const GaussianModel& model, const matops::OperatorMatrices& ops) {
  if (ops.dim != model.dim()) {
    fail(ErrorKind::DimensionMismatch, "operator matrices built for a different dimension");
  }
  Matrix u = build_u(ops);
  Matrix v = ops.has_dense() ? build_v_dense(model, ops) : build_v_indexed(model);
  Eigen::ColPivHouseholderQR<Matrix> qr(v);
  if (qr.rank() < v.cols()) {
    fail(ErrorKind::RankDeficient, "V has rank " + std::to_string(qr.rank()) + " < " + std::to_string(v.cols()));
  }
  return {std::move(u), std::move(v)};
}

/// E[W(z)ᵀW(z)] under z ~ N(μ, Σ), assembled from Isserlis' theorem.
inline Matrix expected_wtw(const GaussianModel& model) {
  const Matrix sigma = model.covariance();
  const Matrix prec = model.precision();
  const Vector vec_prec = matops::vec(prec);
  const Vector vec_sigma = matops::vec(sigma);
  const Matrix kk = matops::kron(prec, prec);
  const Matrix fourth = matops::isserlis_fourth_moment(0.5 * (sigma + sigma.transpose()));
  const Vector kk_vs = kk * vec_sigma;
  Matrix out = vec_prec * vec_prec.transpose() - vec_prec * kk_vs.transpose() - kk_vs * vec_prec.transpose() +
               kk * fourth * kk;
  out /= 16.0;
  return 0.5 * (out + out.transpose());
}

/// Smallest admissible eigenvalue of B relative to its largest.
inline constexpr double kMinRelativeEigenvalue = 1e-10;

/// Vᵀ Uᵀ E(WᵀW) U V, symmetrized.
inline Matrix gram_cov_block(const GaussianModel& model, const Matrix& u, const Matrix& v) {
  const Matrix uv = u * v;
  Matrix b = uv.transpose() * expected_wtw(model) * uv;
  b = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() >= kMinRelativeEigenvalue * hi) || !(hi > 0.0)) {
    fail(ErrorKind::NotSPD, "covariance-direction Gram is near singular");
  }
  return b;
}

inline Matrix gram_cov_block(const GaussianModel& model, const matops::OperatorMatrices& ops) {
  const auto [u, v] = build_uv(model, ops);
  return gram_cov_block(model, u, v);
}

/// Fills coeff_mu and coeff_l from a and b.
inline TangentGram orthonormal_coefficients(TangentGram gram) {
  gram.coeff_mu = matops::gram_orthonormal_coeffs(gram.a);
  gram.coeff_l = matops::gram_orthonormal_coeffs(gram.b);
  return gram;
}

/// Everything one optimizer iteration needs at `model`.
inline TangentGram build_tangent_gram(const GaussianModel& model, const matops::OperatorMatrices& ops) {
  TangentGram gram;
  gram.precision = model.precision();
  gram.a = 0.25 * gram.precision;
  auto [u, v] = build_uv(model, ops);
  gram.b = gram_cov_block(model, u, v);
  gram.uv = u * v;
  gram.u = std::move(u);
  gram.v = std::move(v);
  return orthonormal_coefficients(std::move(gram));
}

/// W(z)·U·V for one point, given y = Σ⁻¹(z − μ).
inline Vector cov_direction_row(const TangentGram& gram, const Vector& y) {
  const Matrix w = 0.25 * (y * y.transpose() - gram.precision);
  return gram.uv.transpose() * matops::vec(w);
}

}  // namespace gap::tangent

#endif
