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

#include "hullmpc/mpc.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "hullmpc/error.hpp"
#include "hullmpc/orbitope.hpp"

namespace hullmpc {
namespace {

MipSettings tight(double tol = 1e-8) {
  MipSettings ms;
  ms.relax.tol = tol;
  return ms;
}

MpcScenario dubins() { return MpcScenario{}; }

MpcScenario spacecraft() {
  MpcScenario s;
  s.n = 3;
  s.order = DynamicsOrder::kSecond;
  s.body_velocity = {1.0, 0.0, 0.0};
  s.state_weight = SmallMatrix::zeros(3, 3);
  s.terminal_weight = SmallMatrix::zeros(3, 3);
  s.input_weight = SmallMatrix::identity(9);
  s.initial_position = {0.0, 0.0, 0.0};
  s.initial_rotation = SmallMatrix(3, 3, {-1, 0, 0, 0, -1, 0, 0, 0, 1});
  s.goal = {5.0, 10.0, 25.0};
  s.zero_terminal_velocity = true;
  return s;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(Mpc, DubinsReachesGoal) {
  const Trajectory tr = plan(dubins(), tight());
  ASSERT_EQ(tr.status, SolveStatus::kOptimal);
  ASSERT_EQ(tr.steps.size(), 21u);
  EXPECT_NEAR(tr.steps.back().position[0], 5.0, 1e-5);
  EXPECT_NEAR(tr.steps.back().position[1], 10.0, 1e-5);
  EXPECT_GE(tr.min_det(), -1e-6);
  EXPECT_LE(tr.max_det(), 1.0 + 1e-6);
  EXPECT_LT(tr.min_det(), 0.99);
  EXPECT_LE(dynamics_residual(tr), 1e-6);
  EXPECT_LE(hull_violation(tr), 1e-6);
  EXPECT_NEAR(tr.steps[0].det, 1.0, 1e-6);
}

TEST(Mpc, DisplacementEqualsTimeStepTimesSpeed) {
  MpcScenario s = dubins();
  s.time_step = 0.8;
  s.horizon = 25;
  const Trajectory tr = plan(s, tight());
  ASSERT_EQ(tr.status, SolveStatus::kOptimal);
  for (std::size_t t = 0; t + 1 < tr.steps.size(); ++t) {
    const auto& a = tr.steps[t];
    const auto& b = tr.steps[t + 1];
    const double step = std::hypot(b.position[0] - a.position[0], b.position[1] - a.position[1]);
    const double speed = std::hypot(a.rotation(0, 0), a.rotation(1, 0));
    EXPECT_NEAR(step, s.time_step * speed, 1e-6);
  }
}

TEST(Mpc, ObjectiveMatchesExplicitCost) {
  MpcScenario s = dubins();
  s.goal_mode = GoalMode::kSoft;
  s.horizon = 12;
  s.state_weight = SmallMatrix(2, 2, {0.3, 0.1, 0.1, 0.2});
  s.terminal_weight = SmallMatrix(2, 2, {4.0, 0.0, 0.0, 2.0});
  s.input_weight = SmallMatrix(2, 2, {1.5, 0.2, 0.2, 0.7});
  const Trajectory tr = plan(s, tight());
  ASSERT_EQ(tr.status, SolveStatus::kOptimal);
  auto quad = [](const SmallMatrix& w, double x, double y) {
    return w(0, 0) * x * x + (w(0, 1) + w(1, 0)) * x * y + w(1, 1) * y * y;
  };
  double cost = 0.0;
  const int T = s.horizon;
  for (int k = 1; k < T; ++k) {
    const auto& p = tr.steps[static_cast<std::size_t>(k)].position;
    cost += quad(s.state_weight, p[0] - s.goal[0], p[1] - s.goal[1]);
  }
  for (int k = 0; k < T; ++k) {
    const SmallMatrix& u = tr.steps[static_cast<std::size_t>(k)].input;
    cost += quad(s.input_weight, u(0, 0), u(1, 0));
  }
  const auto& pT = tr.steps.back().position;
  cost += quad(s.terminal_weight, pT[0] - s.goal[0], pT[1] - s.goal[1]);
  EXPECT_NEAR(tr.objective, cost, 1e-8 * std::max(1.0, std::abs(cost)));
}

TEST(Mpc, GoalAtStartStopsTheVehicle) {
  // T = 2, soft goal at the start: s1 = (1, 0) is forced, and the optimum
  // trades the input against the terminal error by shrinking (a1, b1).
  MpcScenario s = dubins();
  s.horizon = 2;
  s.goal_mode = GoalMode::kSoft;
  s.goal = {0.0, 0.0};
  s.state_weight = SmallMatrix::identity(2);
  s.terminal_weight = SmallMatrix::identity(2);
  const Trajectory tr = plan(s, tight(1e-9));
  ASSERT_EQ(tr.status, SolveStatus::kOptimal);

  // Grid oracle over (a1, b1) in the unit disk; u0 = (a1 - 1, b1), u1 = 0.
  double best = std::numeric_limits<double>::infinity();
  double best_a = 0.0, best_b = 0.0;
  for (int i = -100; i <= 100; ++i) {
    for (int j = -100; j <= 100; ++j) {
      const double a = i * 1e-2, b = j * 1e-2;
      if (a * a + b * b > 1.0) continue;
      const double cost = 1.0 + (a - 1.0) * (a - 1.0) + b * b + (1.0 + a) * (1.0 + a) + b * b;
      if (cost < best) {
        best = cost;
        best_a = a;
        best_b = b;
      }
    }
  }
  EXPECT_NEAR(tr.objective, best, 1e-3);
  EXPECT_NEAR(tr.steps[1].rotation(0, 0), best_a, 1e-2);
  EXPECT_NEAR(tr.steps[1].rotation(1, 0), best_b, 1e-2);
  EXPECT_LT(tr.steps[1].det, 1e-4);
}

TEST(Mpc, UnreachableGoalIsInfeasible) {
  MpcScenario s = dubins();
  s.horizon = 2;
  s.goal = {5.0, 0.0};
  const Trajectory tr = plan(s, tight(1e-7));
  EXPECT_EQ(tr.status, SolveStatus::kInfeasible);
}

TEST(Mpc, SpacecraftReachesGoalAtRest) {
  const Trajectory tr = plan(spacecraft(), tight());
  ASSERT_EQ(tr.status, SolveStatus::kOptimal);
  const auto& last = tr.steps.back();
  EXPECT_NEAR(last.position[0], 5.0, 1e-3);
  EXPECT_NEAR(last.position[1], 10.0, 1e-3);
  EXPECT_NEAR(last.position[2], 25.0, 1e-3);
  EXPECT_LE(norm(last.velocity), 1e-3);
  for (const auto& st : tr.steps) EXPECT_GE(so3_hull_min_eigenvalue(st.rotation), -1e-6) << "t=" << st.t;
  EXPECT_LT(tr.min_det(), 1.0 - 1e-3);
  EXPECT_LE(dynamics_residual(tr), 1e-6);
}

TEST(Mpc, ZeroInputFromRestStaysPut) {
  MpcScenario s = spacecraft();
  s.body_velocity = {0.0, 0.0, 0.0};  // thrusters off
  s.initial_position = {1.0, -2.0, 3.0};
  s.initial_rotation = SmallMatrix::identity(3);
  s.goal = s.initial_position;
  s.zero_terminal_velocity = false;
  s.goal_mode = GoalMode::kSoft;
  s.horizon = 6;
  VehicleState st = initial_state(s);
  const std::vector<double> zero(9, 0.0);
  for (int t = 0; t < 6; ++t) {
    st = simulate(s, st, zero);
    EXPECT_EQ(st.position, s.initial_position);
  }
  const Trajectory tr = plan(s, tight());
  ASSERT_EQ(tr.status, SolveStatus::kOptimal);
  EXPECT_NEAR(tr.objective, 0.0, 1e-7);
  for (const auto& step : tr.steps)
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(step.position[static_cast<std::size_t>(i)], s.initial_position[static_cast<std::size_t>(i)], 1e-6);
}

TEST(Mpc, LayoutAndBlocks) {
  MpcScenario s = dubins();
  s.obstacles.push_back({1.0, 1.0, 2.0, 2.0});
  s.min_speed = MinSpeedRegion{0.5, 4};
  const MpcProblem p = build_mpc(s);
  EXPECT_EQ(p.layout.rotation.size(), 21u);
  EXPECT_EQ(p.layout.input.size(), 20u);
  EXPECT_EQ(p.layout.obstacle_binaries.size(), 20u);
  EXPECT_EQ(p.layout.speed_binaries.size(), 20u);
  EXPECT_EQ(p.program.binaries().size(), 160u);
  int hull = 0;
  for (const auto& b : p.program.blocks()) hull += b.label == "so2_hull";
  EXPECT_EQ(hull, 20);
}

TEST(Mpc, CompleteBinariesSatisfiesRows) {
  MpcScenario s = dubins();
  s.horizon = 3;
  s.goal = {2.0, 1.0};
  s.min_speed = MinSpeedRegion{0.3, 6};
  s.obstacles.push_back({10.0, 10.0, 11.0, 11.0});
  const MpcProblem p = build_mpc(s);
  std::vector<double> x(static_cast<std::size_t>(p.program.num_vars()), 0.0);
  for (int t = 0; t <= 3; ++t) {
    x[static_cast<std::size_t>(p.layout.rotation[static_cast<std::size_t>(t)])] = 0.8;
    x[static_cast<std::size_t>(p.layout.rotation[static_cast<std::size_t>(t)] + 1)] = -0.1;
  }
  for (const auto& [var, value] : complete_binaries(s, p.layout, x)) x[static_cast<std::size_t>(var)] = value;
  for (const auto& blk : p.program.blocks()) {
    if (blk.label != "min_speed" && blk.label != "obstacle") continue;
    std::vector<double> slack = blk.b;
    for (const auto& t : blk.a) slack[static_cast<std::size_t>(t.row)] -= t.value * x[static_cast<std::size_t>(t.col)];
    for (double v : slack) EXPECT_GE(v, -1e-12) << blk.label;
  }
}

TEST(Mpc, ValidationErrors) {
  MpcScenario s = dubins();
  s.horizon = 1;
  EXPECT_THROW(build_mpc(s), InvalidInput);
  s = dubins();
  s.time_step = 0.0;
  EXPECT_THROW(build_mpc(s), InvalidInput);
  s = dubins();
  s.body_velocity = {1.0, 0.0, 0.0};
  EXPECT_THROW(build_mpc(s), InvalidInput);
  s = dubins();
  s.initial_rotation = SmallMatrix(2, 2, {0.5, 0.0, 0.0, 0.5});
  EXPECT_THROW(build_mpc(s), InvalidInput);
  s = dubins();
  s.input_weight = SmallMatrix::zeros(2, 2);
  EXPECT_THROW(build_mpc(s), InvalidInput);
  s = dubins();
  s.state_weight = SmallMatrix(2, 2, {-1.0, 0.0, 0.0, 1.0});
  EXPECT_THROW(build_mpc(s), InvalidInput);
  s = spacecraft();
  s.min_speed = MinSpeedRegion{0.5, 4};
  EXPECT_THROW(build_mpc(s), InvalidInput);
  s = dubins();
  s.zero_terminal_velocity = true;
  EXPECT_THROW(build_mpc(s), InvalidInput);
  s = dubins();
  EXPECT_THROW(build_second_order(s), InvalidInput);
  s = dubins();
  s.min_speed = MinSpeedRegion{1.0, 4};
  EXPECT_THROW(build_mpc(s), InvalidInput);
}

TEST(Rhc, AlreadyCapturedStopsAtStepZero) {
  MpcScenario s = dubins();
  RhcSettings rs;
  rs.capture_radius = 20.0;
  const RhcResult r = receding_horizon(s, static_goal({5.0, 10.0}), rs);
  EXPECT_TRUE(r.captured);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.executed.steps.size(), 1u);
}

TEST(Rhc, ZeroMaxStepsStopsImmediately) {
  RhcSettings rs;
  rs.max_steps = 0;
  const RhcResult r = receding_horizon(dubins(), static_goal({5.0, 10.0}), rs);
  EXPECT_FALSE(r.captured);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.executed.steps.size(), 1u);
}

MpcScenario soft_dubins() {
  MpcScenario s = dubins();
  s.goal_mode = GoalMode::kSoft;
  s.goal = {4.0, 3.0};
  s.state_weight = SmallMatrix::identity(2);
  s.terminal_weight = 10.0 * SmallMatrix::identity(2);
  return s;
}

TEST(Rhc, StaticGoalIsCapturedAndReplayable) {
  const MpcScenario s = soft_dubins();
  RhcSettings rs;
  rs.lookahead = 8;
  rs.max_steps = 40;
  rs.capture_radius = 0.05;
  rs.solver = tight(1e-7);
  const RhcResult r = receding_horizon(s, static_goal(s.goal), rs);
  ASSERT_EQ(r.status, SolveStatus::kOptimal) << r.diagnostic;
  EXPECT_TRUE(r.captured);
  EXPECT_EQ(r.executed.steps.size(), static_cast<std::size_t>(r.steps + 1));
  EXPECT_LE(dynamics_residual(r.executed), 1e-12);
  EXPECT_LE(hull_violation(r.executed), 1e-6);

  // Replaying the recorded inputs reproduces the states bit for bit.
  VehicleState st = initial_state(s);
  for (std::size_t t = 0; t + 1 < r.executed.steps.size(); ++t) {
    const SmallMatrix& u = r.executed.steps[t].input;
    st = simulate(s, st, rotation_params(u));
    EXPECT_EQ(st.position, r.executed.steps[t + 1].position);
    EXPECT_EQ(rotation_matrix(2, st.rotation), r.executed.steps[t + 1].rotation);
  }
}

TEST(Rhc, FirstMoveMatchesOpenLoopPlan) {
  MpcScenario s = soft_dubins();
  s.horizon = 10;
  const Trajectory open = plan(s, tight());
  ASSERT_EQ(open.status, SolveStatus::kOptimal);
  RhcSettings rs;
  rs.lookahead = 10;
  rs.max_steps = 1;
  rs.capture_radius = 0.0;
  rs.solver = tight();
  const RhcResult r = receding_horizon(s, static_goal(s.goal), rs);
  ASSERT_EQ(r.steps, 1);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(r.executed.steps[0].input(i, 0), open.steps[0].input(i, 0), 1e-5);
    EXPECT_NEAR(r.executed.steps[1].position[static_cast<std::size_t>(i)], open.steps[1].position[static_cast<std::size_t>(i)], 1e-6);
  }
}

TEST(Rhc, OscillatingGoal) {
  const GoalProcess g = oscillating_goal({5.0, 0.0}, {0.5, 0.5}, 0.1);
  EXPECT_EQ(g(0.0), (std::vector<double>{5.0, 0.5}));
  const auto v = g(3.0);
  EXPECT_DOUBLE_EQ(v[0], 5.0 + 0.5 * std::sin(0.3));
  EXPECT_DOUBLE_EQ(v[1], 0.5 * std::cos(0.3));
  EXPECT_THROW(oscillating_goal({1.0}, {1.0, 2.0}, 1.0), InvalidInput);
}

TEST(Rhc, BadSettingsThrow) {
  RhcSettings rs;
  rs.lookahead = 1;
  EXPECT_THROW(receding_horizon(dubins(), static_goal({5.0, 10.0}), rs), InvalidInput);
}

TEST(Round, RotationsAlreadyOnTheGroupAreUnchanged) {
  Trajectory tr;
  tr.n = 2;
  tr.body_velocity = {1.0, 0.0};
  for (int t = 0; t < 4; ++t) {
    TrajectoryStep st;
    st.t = t;
    const double th = 0.3 * t;
    st.rotation = SmallMatrix(2, 2, {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)});
    st.position = {0.0, 0.0};
    st.input = SmallMatrix::zeros(2, 2);
    st.det = 1.0;
    tr.steps.push_back(st);
  }
  const RoundedTrajectory r = round_trajectory(tr);
  for (std::size_t t = 0; t < tr.steps.size(); ++t) {
    EXPECT_LT(r.distances[t], 1e-12);
    EXPECT_TRUE(r.unique[t]);
    EXPECT_LT((r.trajectory.steps[t].rotation - tr.steps[t].rotation).frobenius_norm(), 1e-12);
  }
}

TEST(Round, DubinsRotationsGoToTheCircle) {
  const Trajectory tr = plan(dubins(), tight());
  ASSERT_EQ(tr.status, SolveStatus::kOptimal);
  const RoundedTrajectory r = round_trajectory(tr);
  for (std::size_t t = 0; t < tr.steps.size(); ++t) {
    const SmallMatrix& q = r.trajectory.steps[t].rotation;
    EXPECT_NEAR(determinant(q), 1.0, 1e-9);
    EXPECT_LT((q.transposed() * q - SmallMatrix::identity(2)).frobenius_norm(), 1e-9);
    // [a -b; b a] = rho * Rot: the nearest rotation is Rot at distance sqrt(2) |1 - rho|.
    const double rho = std::hypot(tr.steps[t].rotation(0, 0), tr.steps[t].rotation(1, 0));
    EXPECT_NEAR(r.distances[t], std::sqrt(2.0) * std::abs(1.0 - rho), 1e-9);
  }
  EXPECT_GT(r.dynamics_residual, 0.0);
}

TEST(Round, ZeroRotationIsFlagged) {
  Trajectory tr;
  tr.n = 3;
  tr.order = DynamicsOrder::kFirst;
  tr.body_velocity = {1.0, 0.0, 0.0};
  TrajectoryStep st;
  st.rotation = SmallMatrix::zeros(3, 3);
  st.position = {0.0, 0.0, 0.0};
  st.input = SmallMatrix::zeros(3, 3);
  tr.steps.push_back(st);
  const RoundedTrajectory r = round_trajectory(tr);
  EXPECT_FALSE(r.unique[0]);
  EXPECT_NEAR(determinant(r.trajectory.steps[0].rotation), 1.0, 1e-9);
}

}  // namespace
}  // namespace hullmpc
