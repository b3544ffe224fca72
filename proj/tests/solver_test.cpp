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

#include "hullmpc/solver.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hullmpc/error.hpp"
#include "hullmpc/orbitope.hpp"
#include "test_support.hpp"

namespace hullmpc {
namespace {

SolverSettings tight() {
  SolverSettings s;
  s.tol = 1e-8;
  return s;
}

// min ||x - c||^2 s.t. ||x|| <= 1
ConicProgram disk_projection(double cx, double cy) {
  ConicProgram prog(2);
  prog.add_quadratic(0, 0, 1.0);
  prog.add_quadratic(1, 1, 1.0);
  prog.add_linear(0, -2.0 * cx);
  prog.add_linear(1, -2.0 * cy);
  prog.add_constant(cx * cx + cy * cy);
  prog.add_block(so2_hull_rows(0, 1, 2));
  return prog;
}

TEST(SolveTest, ProjectionOntoDisk) {
  const auto res = solve(disk_projection(2.0, 0.0), tight());
  ASSERT_EQ(res.status, SolveStatus::kOptimal);
  EXPECT_NEAR(res.x[0], 1.0, 1e-6);
  EXPECT_NEAR(res.x[1], 0.0, 1e-6);
  EXPECT_NEAR(res.objective, 1.0, 1e-6);
  EXPECT_LE(res.primal_residual, 1e-8);
  EXPECT_LE(res.dual_residual, 1e-8);
}

TEST(SolveTest, SupportFunctionOfPlanarHull) {
  ConicProgram prog(2);
  prog.add_linear(0, -1.0);
  prog.add_block(so2_hull_rows(0, 1, 2));
  const auto res = solve(prog, tight());
  ASSERT_EQ(res.status, SolveStatus::kOptimal);
  EXPECT_NEAR(res.x[0], 1.0, 1e-6);
  EXPECT_NEAR(res.x[1], 0.0, 1e-5);
  EXPECT_NEAR(res.objective, -1.0, 1e-6);
}

TEST(SolveTest, EqualityConstrainedLeastNorm) {
  ConicProgram prog(2);
  prog.add_quadratic(0, 0, 1.0);
  prog.add_quadratic(1, 1, 1.0);
  prog.add_block({{{0, 0, 1.0}, {0, 1, 1.0}}, {1.0}, Cone::zero(1), "sum"});
  const auto res = solve(prog, tight());
  ASSERT_EQ(res.status, SolveStatus::kOptimal);
  EXPECT_NEAR(res.x[0], 0.5, 1e-7);
  EXPECT_NEAR(res.x[1], 0.5, 1e-7);
  // y is the multiplier of the equality row: stationarity 2x + y = 0.
  EXPECT_NEAR(res.y[0], -1.0, 1e-6);
}

TEST(SolveTest, VariableBoundsAreHonored) {
  ConicProgram prog(1);
  prog.add_quadratic(0, 0, 1.0);
  prog.add_linear(0, -6.0);
  prog.set_bounds(0, -1.0, 2.0);
  const auto res = solve(prog, tight());
  ASSERT_EQ(res.status, SolveStatus::kOptimal);
  EXPECT_NEAR(res.x[0], 2.0, 1e-7);
  EXPECT_EQ(res.s.size(), 2u);
}

TEST(SolveTest, DetectsPrimalInfeasibility) {
  ConicProgram prog(2);
  prog.add_quadratic(0, 0, 1.0);
  prog.add_block(so2_hull_rows(0, 1, 2));
  // a >= 2 contradicts the unit disk
  prog.add_block({{{0, 0, -1.0}}, {-2.0}, Cone::nonnegative(1), "a>=2"});
  const auto res = solve(prog);
  EXPECT_EQ(res.status, SolveStatus::kInfeasible);
}

TEST(SolveTest, DetectsUnboundedness) {
  ConicProgram prog(2);
  prog.add_linear(0, -1.0);
  prog.add_block({{{0, 0, -1.0}}, {0.0}, Cone::nonnegative(1), "x>=0"});
  const auto res = solve(prog);
  EXPECT_EQ(res.status, SolveStatus::kUnbounded);
}

TEST(SolveTest, IterationLimitReportsResiduals) {
  SolverSettings s;
  s.max_iters = 3;
  s.tol = 1e-12;
  const auto res = solve(disk_projection(5.0, 3.0), s);
  EXPECT_EQ(res.status, SolveStatus::kIterLimit);
  EXPECT_EQ(res.iterations, 3);
  EXPECT_GT(res.primal_residual + res.dual_residual + res.gap, 0.0);
}

TEST(SolveTest, RejectsMalformedPrograms) {
  EXPECT_THROW(solve(ConicProgram()), InvalidInput);
  ConicProgram with_binary(2);
  with_binary.mark_binary(1);
  EXPECT_THROW(solve(with_binary), InvalidInput);
  SolverSettings bad;
  bad.tol = 0.0;
  EXPECT_THROW(solve(disk_projection(1, 1), bad), InvalidInput);
}

// Oracle: min over SO(3) of trace(C R) via random unit quaternions followed by
// a shrinking random-perturbation search.
double sampled_min_trace(const SmallMatrix& c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  auto value = [&](const std::array<double, 4>& q) { return (c * rotation_from_quaternion(q[0], q[1], q[2], q[3])).trace(); };
  std::array<double, 4> best{1, 0, 0, 0};
  double best_v = value(best);
  for (int i = 0; i < 20000; ++i) {
    std::array<double, 4> q{g(rng), g(rng), g(rng), g(rng)};
    const double v = value(q);
    if (v < best_v) {
      best_v = v;
      best = q;
    }
  }
  double step = 0.1;
  while (step > 1e-7) {
    bool improved = false;
    for (int k = 0; k < 40; ++k) {
      std::array<double, 4> q = best;
      for (double& e : q) e += step * g(rng);
      const double v = value(q);
      if (v < best_v) {
        best_v = v;
        best = q;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best_v;
}

TEST(SolveTest, LinearObjectiveOverSpatialHullMatchesRotationSampling) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::array<int, 9> idx{0, 1, 2, 3, 4, 5, 6, 7, 8};
  for (int trial = 0; trial < 5; ++trial) {
    SmallMatrix c(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) c(r, k) = u(rng);
    ConicProgram prog(9);
    // trace(C X) = sum_ij C_ij X_ji
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) prog.add_linear(3 * j + i, c(i, j));
    prog.add_block(so3_hull_rows(idx, 9));
    const auto res = solve(prog, tight());
    ASSERT_EQ(res.status, SolveStatus::kOptimal);
    EXPECT_NEAR(res.objective, sampled_min_trace(c, rng), 1e-3);
  }
}

TEST(SolveTest, SlackBlocksLieInTheirCones) {
  const auto res = solve(disk_projection(-3.0, 4.0), tight());
  ASSERT_EQ(res.status, SolveStatus::kOptimal);
  const auto projected = project_cone(res.s, Cone::second_order(3));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(projected[i], res.s[i], 1e-8);
}

TEST(SolveTest, DeterministicIterates) {
  const auto a = solve(disk_projection(0.3, 2.0));
  const auto b = solve(disk_projection(0.3, 2.0));
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
}

TEST(SolveTest, ArgminInvariantUnderObjectiveScaling) {
  ConicProgram base = disk_projection(1.5, -2.0);
  ConicProgram scaled(2);
  scaled.add_quadratic(0, 0, 7.0);
  scaled.add_quadratic(1, 1, 7.0);
  scaled.add_linear(0, -7.0 * 3.0);
  scaled.add_linear(1, 7.0 * 4.0);
  scaled.add_block(so2_hull_rows(0, 1, 2));
  const auto a = solve(base, tight());
  const auto b = solve(scaled, tight());
  ASSERT_EQ(a.status, SolveStatus::kOptimal);
  ASSERT_EQ(b.status, SolveStatus::kOptimal);
  EXPECT_NEAR(a.x[0], b.x[0], 1e-6);
  EXPECT_NEAR(a.x[1], b.x[1], 1e-6);
}

TEST(WarmStartTest, ResolvingFromOptimumTakesNoMoreIterations) {
  const auto prog = disk_projection(2.0, 1.0);
  const auto cold = solve(prog);
  SolverSettings s;
  s.warm = warm_start(cold, prog);
  const auto warm = solve(prog, s);
  EXPECT_TRUE(warm.warm_started);
  EXPECT_EQ(warm.status, SolveStatus::kOptimal);
  EXPECT_LE(warm.iterations, cold.iterations);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-5);
}

TEST(WarmStartTest, ZeroWarmStartEqualsColdStart) {
  const auto prog = disk_projection(2.0, 1.0);
  const auto cold = solve(prog);
  SolverSettings s;
  s.warm = WarmStart{std::vector<double>(2, 0.0), std::vector<double>(3, 0.0), std::vector<double>(3, 0.0), 0.0};
  const auto warm = solve(prog, s);
  EXPECT_EQ(warm.x, cold.x);
  EXPECT_EQ(warm.iterations, cold.iterations);
}

TEST(WarmStartTest, LayoutMismatchFallsBackToColdStart) {
  const auto prog = disk_projection(2.0, 1.0);
  const auto cold = solve(prog);
  SolveResult bogus;
  bogus.x = {1.0, 2.0, 3.0};
  SolverSettings s;
  s.warm = warm_start(bogus, prog);
  const auto res = solve(prog, s);
  EXPECT_TRUE(res.warm_start_rejected);
  EXPECT_FALSE(res.warm_started);
  EXPECT_EQ(res.x, cold.x);
}

TEST(ProgramDumpTest, JsonRoundTripReproducesSolve) {
  ConicProgram prog = disk_projection(2.0, -1.0);
  prog.set_bounds(1, -0.25, ConicProgram::kInf);
  std::stringstream ss;
  prog.write_json(ss);
  const ConicProgram back = ConicProgram::read_json(ss);
  EXPECT_EQ(back.num_vars(), prog.num_vars());
  EXPECT_EQ(back.num_rows(), prog.num_rows());
  const auto a = solve(prog);
  const auto b = solve(back);
  EXPECT_EQ(a.x, b.x);
}

TEST(ProgramDumpTest, MalformedJsonThrows) {
  std::stringstream ss("{\"n\": 2}");
  EXPECT_THROW(ConicProgram::read_json(ss), InvalidInput);
}

}  // namespace
}  // namespace hullmpc
