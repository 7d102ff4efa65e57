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

#ifndef GAP_NELDER_MEAD_HPP
#define GAP_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "gap/error.hpp"
#include "gap/types.hpp"

namespace gap::nm {

struct Options {
  std::size_t max_evals = 2000;
  /// Converged once every vertex lies within this distance of the best one.
  double x_tol = 1e-6;
  /// Edge length of the initial simplex along each axis.
  double initial_step = 0.1;
};

struct Result {
  Vector x;
  double fx = 0.0;
  std::size_t evals = 0;
  bool converged = false;
  double diameter = 0.0;
};

/// Nelder-Mead with standard coefficients (reflection 1, expansion 2, contraction ½, shrink ½).
/// Non-finite objective values are treated as +∞.
inline Result minimize(const std::function<double(const Vector&)>& f, const Vector& x0, const Options& opt = {}) {
  const auto n = x0.size();
  if (n < 1) {
    fail(ErrorKind::InvalidArgument, "Nelder-Mead needs at least one coordinate");
  }
  std::size_t evals = 0;
  auto eval = [&](const Vector& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };
  std::vector<Vector> simplex(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> values(simplex.size());
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i) + 1](i) += opt.initial_step;
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(simplex.size());
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      d = std::max(d, (simplex[order[i]] - simplex[order[0]]).lpNorm<Eigen::Infinity>());
    }
    return d;
  };
  auto sort = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  };
  sort();
  while (evals < opt.max_evals && diameter() > opt.x_tol) {
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += simplex[order[i]];
    centroid /= static_cast<double>(n);
    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double fr = eval(reflected);
    if (fr < values[order[0]]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      const Vector contracted =
          outside ? Vector(centroid + 0.5 * (reflected - centroid)) : Vector(centroid + 0.5 * (simplex[worst] - centroid));
      const double fc = eval(contracted);
      if (fc < (outside ? fr : values[worst])) {
        simplex[worst] = contracted;
        values[worst] = fc;
      } else {
        const Vector best = simplex[order[0]];
        for (std::size_t i = 1; i < order.size(); ++i) {
          simplex[order[i]] = best + 0.5 * (simplex[order[i]] - best);
          values[order[i]] = eval(simplex[order[i]]);
        }
      }
    }
    sort();
  }
  Result out;
  out.x = simplex[order[0]];
  out.fx = values[order[0]];
  out.evals = evals;
  out.diameter = diameter();
  out.converged = out.diameter <= opt.x_tol;
  return out;
}

}  // namespace gap::nm

#endif
