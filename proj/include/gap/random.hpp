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

#ifndef GAP_RANDOM_HPP
#define GAP_RANDOM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

// Counter-based generation (Salmon et al., SC 2011): every draw is a pure function of
// (seed, stream, index, block), so results do not depend on evaluation order or thread count.

namespace gap::random {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds.
inline Counter philox4x32(Counter ctr, Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53;
  constexpr std::uint32_t kM1 = 0xCD9E8D57;
  constexpr std::uint32_t kW0 = 0x9E3779B9;
  constexpr std::uint32_t kW1 = 0xBB67AE85;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream identifiers so different consumers of one seed never share counters.
enum class Stream : std::uint32_t {
  GaussianSamples = 0,
  DesignMatrix = 1,
  Labels = 2,
  OracleInstances = 3,
  Test = 0xFFFF,
};

/// Maps 64 random bits to a double strictly inside (0, 1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  // 52 bits keep (bits + ½)·2⁻⁵² below 1 after rounding.
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

inline Counter draw_block(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint32_t block) {
  const Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), block,
                    static_cast<std::uint32_t>(stream)};
  return philox4x32(ctr, key);
}

/// Two uniforms in (0, 1) for (seed, stream, index, block).
inline std::pair<double, double> uniform_pair(std::uint64_t seed, Stream stream, std::uint64_t index,
                                              std::uint32_t block) {
  const Counter r = draw_block(seed, stream, index, block);
  return {to_open_unit(r[0], r[1]), to_open_unit(r[2], r[3])};
}

/// Two independent standard normals via Box-Muller.
inline std::pair<double, double> normal_pair(std::uint64_t seed, Stream stream, std::uint64_t index,
                                             std::uint32_t block) {
  const auto [u1, u2] = uniform_pair(seed, stream, index, block);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Standard normal number `k` of draw `index`; normals 2b and 2b+1 share one Philox block b.
inline double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint32_t k) {
  const auto [a, b] = normal_pair(seed, stream, index, k / 2);
  return (k % 2 == 0) ? a : b;
}

/// Seed for optimizer iteration `iter` derived from a run seed.
inline std::uint64_t iteration_seed(std::uint64_t run_seed, std::uint64_t iter) {
  return splitmix64(run_seed ^ splitmix64(iter + 0x632BE59BD9B4E019ULL));
}

}  // namespace gap::random

#endif
