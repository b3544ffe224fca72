// Copyright 2026 The hullmpc Authors
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

#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "hullmpc/conic_program.hpp"
#include "hullmpc/numerics.hpp"
#include "hullmpc/orbitope.hpp"

namespace hullmpc::testing {

inline SmallMatrix random_rotation(std::mt19937_64& rng, int n) {
  if (n == 2) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    const double th = ang(rng);
    return SmallMatrix(2, 2, {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)});
  }
  std::normal_distribution<double> g(0.0, 1.0);
  return rotation_from_quaternion(g(rng), g(rng), g(rng), g(rng));
}

/// Convex combination of k random rotations.
inline SmallMatrix random_hull_point(std::mt19937_64& rng, int n, int k = 5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& v : w) total += (v = -std::log(1.0 - u(rng)));
  SmallMatrix out(n, n);
  for (int i = 0; i < k; ++i) out = out + (w[static_cast<std::size_t>(i)] / total) * random_rotation(rng, n);
  return out;
}

/// s = b - A x for a single block.
inline std::vector<double> block_slack(const ConstraintBlock& blk, std::span<const double> x) {
  std::vector<double> s = blk.b;
  for (const Triplet& t : blk.a) s[static_cast<std::size_t>(t.row)] -= t.value * x[static_cast<std::size_t>(t.col)];
  return s;
}

}  // namespace hullmpc::testing
