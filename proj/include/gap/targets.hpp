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

#ifndef GAP_TARGETS_HPP
#define GAP_TARGETS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gap/error.hpp"
#include "gap/random.hpp"
#include "gap/types.hpp"

namespace gap::targets {

/// Standard Cauchy: √p₀(x) = π^{−1/2}(1 + x²)^{−1/2}.
inline TargetDensity student_t1_target() {
  TargetDensity t;
  t.name = "t1";
  t.dim = 1;
  t.log_sqrt = [](const ConstVectorRef& z) {
    return -0.5 * std::log(std::numbers::pi) - 0.5 * std::log1p(z(0) * z(0));
  };
  t.normalized = true;
  t.log_normalizer = 0.0;
  return t;
}

struct MixtureSpec {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;

  void validate() const {
    if (weights.empty() || weights.size() != means.size() || weights.size() != variances.size()) {
      fail(ErrorKind::InvalidSpec, "mixture needs equal, nonzero numbers of weights, means and variances");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (!(weights[k] > 0.0) || !std::isfinite(weights[k])) {
        fail(ErrorKind::InvalidSpec, "mixture weights must be positive");
      }
      if (!(variances[k] > 0.0) || !std::isfinite(variances[k]) || !std::isfinite(means[k])) {
        fail(ErrorKind::InvalidSpec, "mixture variances must be positive and means finite");
      }
      total += weights[k];
    }
    if (std::abs(total - 1.0) > 1e-12) {
      fail(ErrorKind::InvalidSpec, "mixture weights sum to " + std::to_string(total));
    }
  }
};

inline double mixture_log_density(const MixtureSpec& spec, double x) {
  double best = -kInf;
  std::vector<double> terms(spec.weights.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double d = x - spec.means[k];
    terms[k] = std::log(spec.weights[k]) - 0.5 * std::log(2.0 * std::numbers::pi * spec.variances[k]) -
               d * d / (2.0 * spec.variances[k]);
    best = std::max(best, terms[k]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - best);
  return best + std::log(sum);
}

inline TargetDensity mixture_target(const MixtureSpec& spec) {
  spec.validate();
  TargetDensity t;
  t.name = "mixture";
  t.dim = 1;
  t.log_sqrt = [spec](const ConstVectorRef& z) { return 0.5 * mixture_log_density(spec, z(0)); };
  t.normalized = true;
  t.log_normalizer = 0.0;
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t k = 0; k < spec.means.size(); ++k) {
    const double s = std::sqrt(spec.variances[k]);
    lo = std::min(lo, spec.means[k] - 12.0 * s);
    hi = std::max(hi, spec.means[k] + 12.0 * s);
  }
  t.support = std::pair{lo, hi};
  return t;
}

/// Bernoulli-logit data with intercept column, plus the Gaussian prior on the coefficients.
struct LogisticDataset {
  Matrix x;
  Vector y;
  Vector prior_mean;
  Matrix prior_cov;

  void validate() const {
    if (x.rows() != y.size()) {
      fail(ErrorKind::DimensionMismatch, "design rows and label count differ");
    }
    if (x.cols() != prior_mean.size() || prior_cov.rows() != prior_mean.size() ||
        prior_cov.cols() != prior_mean.size()) {
      fail(ErrorKind::DimensionMismatch, "design columns, prior mean and prior covariance disagree");
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y(i) != 0.0 && y(i) != 1.0) {
        fail(ErrorKind::InvalidArgument, "labels must be 0 or 1");
      }
    }
    Eigen::LLT<Matrix> llt(prior_cov);
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::NotSPD, "prior covariance is not positive definite");
    }
  }
};

/// log(1 + eᵘ) without overflow.
inline double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

inline double sigmoid(double u) {
  return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

/// ½[log-likelihood + log prior]; the evidence is unknown, so the target is flagged unnormalized.
inline TargetDensity logistic_posterior_target(const LogisticDataset& data) {
  data.validate();
  const GaussianModel prior = GaussianModel::from_covariance(data.prior_mean, data.prior_cov);
  TargetDensity t;
  t.name = "logistic";
  t.dim = data.x.cols();
  t.log_sqrt = [data, prior](const ConstVectorRef& beta) {
    if (beta.size() != data.x.cols()) {
      fail(ErrorKind::DimensionMismatch, "coefficient vector has the wrong length");
    }
    const Vector u = data.x * beta;
    double loglik = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      loglik += data.y(i) * u(i) - softplus(u(i));
    }
    // log N(β; μ*, Σ*) = 2·log q_prior(β)
    return 0.5 * loglik + gaussian_log_sqrt_density(prior, beta);
  };
  t.normalized = false;
  return t;
}

/// Rows [1, x₁, x₂] with (x₁, x₂) standard bivariate normal of correlation rho; y ~ Bernoulli(σ(xβ)).
inline LogisticDataset generate_logistic_data(std::size_t n, const Vector& beta, double rho, std::uint64_t seed,
                                              const Vector& prior_mean, const Matrix& prior_cov) {
  if (!(std::abs(rho) < 1.0)) {
    fail(ErrorKind::BadCorrelation, "correlation must lie strictly inside (-1, 1)");
  }
  if (n < 1) {
    fail(ErrorKind::InvalidArgument, "need at least one observation");
  }
  if (beta.size() != 3) {
    fail(ErrorKind::DimensionMismatch, "coefficient vector must have length 3");
  }
  LogisticDataset data;
  data.x.resize(static_cast<Eigen::Index>(n), 3);
  data.y.resize(static_cast<Eigen::Index>(n));
  const double tail = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [g1, g2] = random::normal_pair(seed, random::Stream::DesignMatrix, i, 0);
    const auto row = static_cast<Eigen::Index>(i);
    data.x(row, 0) = 1.0;
    data.x(row, 1) = g1;
    data.x(row, 2) = rho * g1 + tail * g2;
    const double u = random::uniform_pair(seed, random::Stream::Labels, i, 0).first;
    data.y(row) = (u < sigmoid(data.x.row(row).dot(beta))) ? 1.0 : 0.0;
  }
  data.prior_mean = prior_mean;
  data.prior_cov = prior_cov;
  data.validate();
  return data;
}

/// CSV with header y,x1,x2,...; the intercept column is implicit.
inline void write_logistic_csv(std::ostream& os, const LogisticDataset& data) {
  os << 'y';
  for (Eigen::Index j = 1; j < data.x.cols(); ++j) os << ",x" << j;
  os << '\n';
  os.precision(17);
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    os << static_cast<int>(data.y(i));
    for (Eigen::Index j = 1; j < data.x.cols(); ++j) os << ',' << data.x(i, j);
    os << '\n';
  }
}

inline LogisticDataset read_logistic_csv(std::istream& is, const Vector& prior_mean, const Matrix& prior_cov) {
  std::string line;
  if (!std::getline(is, line)) {
    fail(ErrorKind::ParseError, "empty dataset");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "y") {
    fail(ErrorKind::ParseError, "dataset header must start with y");
  }
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "x" + std::to_string(j)) {
      fail(ErrorKind::ParseError, "unexpected column name " + header[j]);
    }
  }
  const std::size_t cols = header.size();
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(ErrorKind::ParseError, "bad number '" + cell + "' in dataset");
      }
    }
    if (row.size() != cols) {
      fail(ErrorKind::ParseError, "dataset row has " + std::to_string(row.size()) + " fields");
    }
    rows.push_back(std::move(row));
  }
  LogisticDataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.x.resize(n, static_cast<Eigen::Index>(cols));
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    data.y(i) = r[0];
    data.x(i, 0) = 1.0;
    for (std::size_t j = 1; j < cols; ++j) data.x(i, static_cast<Eigen::Index>(j)) = r[j];
  }
  data.prior_mean = prior_mean;
  data.prior_cov = prior_cov;
  data.validate();
  return data;
}

}  // namespace gap::targets

#endif
