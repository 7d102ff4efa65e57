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

#ifndef GAP_MATOPS_HPP
#define GAP_MATOPS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gap/error.hpp"
#include "gap/types.hpp"

/**
 * \file
 * \brief Matrix-calculus kit: vec/vech, Kronecker products, commutation, diagonal-selection and
 * elimination operators, Gaussian fourth moments and Gram-matrix orthonormalization.
 */

namespace gap::matops {

/// Column-major stacking.
inline Vector vec(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

/// Column-major stacking of the lower triangle, diagonal included.
inline Vector vech(const Matrix& a) {
  if (a.rows() != a.cols()) {
    fail(ErrorKind::NotSquare, "vech needs a square matrix");
  }
  const auto n = a.rows();
  Vector out(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      out(k++) = a(i, j);
    }
  }
  return out;
}

/// Inverse of vec for an n×n matrix.
inline Matrix unvec(const Vector& v, Eigen::Index n) {
  if (v.size() != n * n) {
    fail(ErrorKind::DimensionMismatch, "unvec length mismatch");
  }
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Largest dimension for which the operators are also materialized densely.
inline constexpr Eigen::Index kDenseOperatorLimit = 16;

/// Commutation T_{D,D}, diagonal selector R_D and elimination S_D for D×D matrices.
/**
 * The index maps are always present. Dense matrices are materialized only for
 * D ≤ kDenseOperatorLimit since they grow as D⁴.
 */
struct OperatorMatrices {
  Eigen::Index dim = 0;
  /// (T x)[k] = x[transpose_index[k]].
  std::vector<Eigen::Index> transpose_index;
  /// vec positions kept by R_D.
  std::vector<Eigen::Index> diagonal_index;
  /// (S x)[k] = x[vech_index[k]].
  std::vector<Eigen::Index> vech_index;
  std::optional<Matrix> t_dd;
  std::optional<Matrix> r_d;
  std::optional<Matrix> s_d;

  [[nodiscard]] bool has_dense() const { return t_dd.has_value(); }

  [[nodiscard]] Vector apply_t(const Vector& x) const {
    Vector out(x.size());
    for (std::size_t k = 0; k < transpose_index.size(); ++k) {
      out(static_cast<Eigen::Index>(k)) = x(transpose_index[k]);
    }
    return out;
  }

  [[nodiscard]] Vector apply_r(const Vector& x) const {
    Vector out = Vector::Zero(x.size());
    for (auto k : diagonal_index) {
      out(k) = x(k);
    }
    return out;
  }

  [[nodiscard]] Vector apply_s(const Vector& x) const {
    Vector out(static_cast<Eigen::Index>(vech_index.size()));
    for (std::size_t k = 0; k < vech_index.size(); ++k) {
      out(static_cast<Eigen::Index>(k)) = x(vech_index[k]);
    }
    return out;
  }

  /// Sᵀ y: scatters vech coordinates back into a vec with zeros above the diagonal.
  [[nodiscard]] Vector apply_s_transpose(const Vector& y) const {
    Vector out = Vector::Zero(dim * dim);
    for (std::size_t k = 0; k < vech_index.size(); ++k) {
      out(vech_index[k]) = y(static_cast<Eigen::Index>(k));
    }
    return out;
  }
};

inline OperatorMatrices build_operator_matrices(Eigen::Index dim) {
  if (dim < 1) {
    fail(ErrorKind::InvalidArgument, "operator dimension must be positive");
  }
  OperatorMatrices ops;
  ops.dim = dim;
  const auto n2 = dim * dim;
  ops.transpose_index.resize(static_cast<std::size_t>(n2));
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      ops.transpose_index[static_cast<std::size_t>(i + j * dim)] = j + i * dim;
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    ops.diagonal_index.push_back(i + i * dim);
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = j; i < dim; ++i) {
      ops.vech_index.push_back(i + j * dim);
    }
  }
  if (dim <= kDenseOperatorLimit) {
    const auto m = static_cast<Eigen::Index>(ops.vech_index.size());
    Matrix t = Matrix::Zero(n2, n2);
    Matrix r = Matrix::Zero(n2, n2);
    Matrix s = Matrix::Zero(m, n2);
    for (Eigen::Index k = 0; k < n2; ++k) {
      t(k, ops.transpose_index[static_cast<std::size_t>(k)]) = 1.0;
    }
    for (auto k : ops.diagonal_index) {
      r(k, k) = 1.0;
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      s(k, ops.vech_index[static_cast<std::size_t>(k)]) = 1.0;
    }
    ops.t_dd = std::move(t);
    ops.r_d = std::move(r);
    ops.s_d = std::move(s);
  }
  return ops;
}

inline void require_spd(const Matrix& sigma, const char* what) {
  if (sigma.rows() != sigma.cols()) {
    fail(ErrorKind::NotSquare, std::string(what) + " is not square");
  }
  if (!sigma.isApprox(sigma.transpose(), 1e-10)) {
    fail(ErrorKind::NotSPD, std::string(what) + " is not symmetric");
  }
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::NotSPD, std::string(what) + " is not positive definite");
  }
}

/// E[(z−μ)(z−μ)ᵀ ⊗ (z−μ)(z−μ)ᵀ] for z ~ N(μ, Σ).
/**
 * Row (a,b) and column (c,d) index the pairs of the Kronecker layout; the entry is
 * σ_ab σ_cd + σ_ac σ_bd + σ_ad σ_bc.
 */
inline Matrix isserlis_fourth_moment(const Matrix& sigma) {
  require_spd(sigma, "covariance");
  const auto n = sigma.rows();
  Matrix out(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index d = 0; d < n; ++d) {
          out(a * n + b, c * n + d) =
              sigma(a, b) * sigma(c, d) + sigma(a, c) * sigma(b, d) + sigma(a, d) * sigma(b, c);
        }
      }
    }
  }
  return out;
}

/// Gram matrices whose estimated condition number exceeds this are rejected.
inline constexpr double kMaxGramCondition = 1e12;

inline void require_well_conditioned_gram(const Matrix& gram) {
  if (gram.rows() != gram.cols()) {
    fail(ErrorKind::NotSquare, "Gram matrix is not square");
  }
  if (!gram.allFinite()) {
    fail(ErrorKind::NotSPD, "Gram matrix has non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxGramCondition) {
    fail(ErrorKind::NotSPD, "Gram matrix is not positive definite or is too ill-conditioned");
  }
}

/// Lower-triangular C with C·G·Cᵀ = I, computed as the inverse of G's Cholesky factor.
/**
 * Row j of C holds the coefficients of the j-th Gram-Schmidt vector in the original basis,
 * with a positive diagonal.
 */
inline Matrix gram_orthonormal_coeffs(const Matrix& gram) {
  require_well_conditioned_gram(gram);
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::NotSPD, "Cholesky of Gram matrix failed");
  }
  const auto k = gram.rows();
  Matrix coeffs = llt.matrixL().solve(Matrix::Identity(k, k));
  return coeffs.triangularView<Eigen::Lower>();
}

/// The same coefficients from the determinant expansion of Gram-Schmidt.
/**
 * C(j,i) = (−1)^{i+j} M(j,i) / √(D_{j−1} D_j), with D_j the leading principal minors of G and
 * M(j,i) the minor of the j-th leading block with its last row and i-th column removed.
 * Cost grows like k⁵; meant for small Grams and for cross-checking.
 */
inline Matrix gram_orthonormal_coeffs_minors(const Matrix& gram) {
  require_well_conditioned_gram(gram);
  const auto k = gram.rows();
  std::vector<double> leading(static_cast<std::size_t>(k) + 1, 1.0);
  for (Eigen::Index j = 1; j <= k; ++j) {
    leading[static_cast<std::size_t>(j)] = gram.topLeftCorner(j, j).determinant();
    if (!(leading[static_cast<std::size_t>(j)] > 0.0)) {
      fail(ErrorKind::NotSPD, "leading principal minor " + std::to_string(j) + " is not positive");
    }
  }
  Matrix coeffs = Matrix::Zero(k, k);
  for (Eigen::Index j = 1; j <= k; ++j) {
    const double norm = std::sqrt(leading[static_cast<std::size_t>(j - 1)] * leading[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 1; i <= j; ++i) {
      double minor = 1.0;
      if (j > 1) {
        Matrix sub(j - 1, j - 1);
        for (Eigen::Index r = 0; r < j - 1; ++r) {
          Eigen::Index cc = 0;
          for (Eigen::Index c = 0; c < j; ++c) {
            if (c == i - 1) continue;
            sub(r, cc++) = gram(r, c);
          }
        }
        minor = sub.determinant();
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      coeffs(j - 1, i - 1) = sign * minor / norm;
    }
  }
  return coeffs;
}

}  // namespace gap::matops

#endif
