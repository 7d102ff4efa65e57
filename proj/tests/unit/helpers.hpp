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


#ifndef GAP_TESTS_HELPERS_HPP
#define GAP_TESTS_HELPERS_HPP

#include <random>

#include <gtest/gtest.h>

#include "gap/error.hpp"
#include "gap/types.hpp"

namespace gap::testing {

/// Asserts that `fn` throws gap::Error of the given kind.
template <class Fn>
::testing::AssertionResult throws_kind(ErrorKind kind, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.kind() == kind) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "threw " << to_string(e.kind()) << " (" << e.what() << "), expected "
                                         << to_string(kind);
  } catch (const std::exception& e) {
    return ::testing::AssertionFailure() << "threw non-gap exception: " << e.what();
  }
  return ::testing::AssertionFailure() << "did not throw " << to_string(kind);
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n01;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n01(rng);
  }
  return m;
}

/// Well-conditioned SPD matrix: A Aᵀ/n + ½I.
inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix a = random_matrix(rng, n, n);
  return a * a.transpose() / static_cast<double>(n) + 0.5 * Matrix::Identity(n, n);
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n) { return random_matrix(rng, n, 1); }

}  // namespace gap::testing

#endif
