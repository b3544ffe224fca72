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

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hullmpc/conic_program.hpp"
#include "hullmpc/mip.hpp"
#include "hullmpc/numerics.hpp"
#include "hullmpc/solver.hpp"

namespace hullmpc {

enum class DynamicsOrder { kFirst, kSecond };
enum class GoalMode { kHard, kSoft };

std::string to_string(DynamicsOrder order);
std::string to_string(GoalMode mode);

/// Number of free parameters of a relaxed rotation: (a, b) for n = 2,
/// the nine entries (row-major) for n = 3.
int rotation_dim(int n);
/// n x n matrix from rotation parameters.
SmallMatrix rotation_matrix(int n, std::span<const double> params);
/// Inverse of rotation_matrix. For n = 2 the matrix must have the form
/// [a -b; b a] within 1e-9.
std::vector<double> rotation_params(const SmallMatrix& r);

/// Vehicle model, cost and constraints for one planning problem.
///
/// Rotation-rate (W) and input (u) entries use the rotation parameter
/// layout, so for n = 2 an input (ua, ub) stands for [ua -ub; ub ua].
struct MpcScenario {
  int n = 2;
  DynamicsOrder order = DynamicsOrder::kFirst;
  int horizon = 20;
  double time_step = 1.0;
  std::vector<double> body_velocity{1.0, 0.0};

  SmallMatrix state_weight = SmallMatrix::zeros(2, 2);     // Q, n x n
  SmallMatrix input_weight = SmallMatrix::identity(2);     // R_w, rotation_dim x rotation_dim
  SmallMatrix terminal_weight = SmallMatrix::zeros(2, 2);  // M_w, n x n

  std::vector<double> initial_position{0.0, 0.0};
  SmallMatrix initial_rotation = SmallMatrix::identity(2);
  std::vector<double> initial_velocity;       // second order; empty means zero
  SmallMatrix initial_rotation_rate;          // second order; empty means zero

  GoalMode goal_mode = GoalMode::kHard;
  std::vector<double> goal{5.0, 10.0};
  bool zero_terminal_velocity = false;  // second order, hard goal only

  std::vector<RectObstacle> obstacles;
  double obstacle_big_m = kDefaultObstacleBigM;
  std::optional<MinSpeedRegion> min_speed;
  double min_speed_big_m = kDefaultMinSpeedBigM;
  std::optional<std::pair<double, double>> input_bounds;
};

/// Throws InvalidInput on the first broken invariant. With
/// `rotation_in_hull_only` the initial rotation only needs to lie in
/// conv(SO(n)) (receding-horizon replans start from relaxed states).
void validate(const MpcScenario& scen, bool rotation_in_hull_only = false);

/// Variable indices of a built program; entry t holds the first index of
/// that block at step t (-1 when absent).
struct MpcLayout {
  int n = 2;
  int rot_dim = 2;
  int horizon = 0;
  DynamicsOrder order = DynamicsOrder::kFirst;
  std::vector<int> rotation;  // t = 0..T
  std::vector<int> position;  // t = 0..T
  std::vector<int> velocity;  // t = 0..T, second order
  std::vector<int> rate;      // t = 0..T, second order
  std::vector<int> input;     // t = 0..T-1
  std::vector<std::array<int, 4>> obstacle_binaries;
  std::vector<std::vector<int>> speed_binaries;
};

struct MpcProblem {
  ConicProgram program;
  MpcLayout layout;
};

/// Objective: sum_{k=1}^{T-1} |s_k - g|_Q^2 + sum_{k=0}^{T-1} |u_k|_R^2 + |s_T - g|_M^2.
MpcProblem build_first_order(const MpcScenario& scen);
MpcProblem build_second_order(const MpcScenario& scen);
/// Dispatches on scen.order.
MpcProblem build_mpc(const MpcScenario& scen);

struct TrajectoryStep {
  int t = 0;
  double time = 0.0;
  SmallMatrix rotation;
  std::vector<double> position;
  std::vector<double> velocity;  // second order
  SmallMatrix rate;              // second order
  SmallMatrix input;             // zero on the last row
  double det = 0.0;
  int solve_iterations = 0;
  double solve_seconds = 0.0;
};

struct Trajectory {
  int n = 2;
  DynamicsOrder order = DynamicsOrder::kFirst;
  double time_step = 1.0;
  std::vector<double> body_velocity;
  std::vector<TrajectoryStep> steps;
  SolveStatus status = SolveStatus::kIterLimit;
  double objective = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
  MipStats mip;

  double min_det() const;
  double max_det() const;
  double path_length() const;
};

Trajectory extract_trajectory(const MpcScenario& scen, const MpcLayout& layout, std::span<const double> x);

/// Largest absolute residual of the discrete dynamics along `traj`.
double dynamics_residual(const Trajectory& traj);
/// Largest hull violation: ||(a,b)|| - 1 for n = 2, minus the smallest
/// eigenvalue of the spectrahedral matrix for n = 3 (<= 0 when inside).
double hull_violation(const Trajectory& traj);

/// Binary assignment consistent with the continuous part of `x`: each
/// minimum-speed group keeps the face with the largest value, each obstacle
/// group keeps the side the point is farthest beyond.
std::vector<std::pair<int, int>> complete_binaries(const MpcScenario& scen, const MpcLayout& layout,
                                                   std::span<const double> x);

/// One-shot plan; branch and bound runs when the scenario has binaries.
/// Without a heuristic in `settings`, complete_binaries is used.
Trajectory plan(const MpcScenario& scen, const MipSettings& settings = {});

/// Dynamic state of the vehicle.
struct VehicleState {
  std::vector<double> rotation;  // rotation parameters
  std::vector<double> position;
  std::vector<double> velocity;  // second order
  std::vector<double> rate;      // second order
};

VehicleState initial_state(const MpcScenario& scen);
/// Forward-Euler step shared by planning checks and closed-loop execution.
VehicleState simulate(const MpcScenario& scen, const VehicleState& state, std::span<const double> input);

using GoalProcess = std::function<std::vector<double>(double time)>;

GoalProcess static_goal(std::vector<double> goal);
/// center + (A_0 sin(w t), A_1 cos(w t), A_2 sin(w t)) truncated to the
/// dimension of `center`.
GoalProcess oscillating_goal(std::vector<double> center, std::vector<double> amplitude, double omega);

struct RhcSettings {
  int lookahead = 5;
  int max_steps = 40;
  double capture_radius = 0.1;
  MipSettings solver;
};

struct RhcResult {
  Trajectory executed;  // row 0 is the initial state; row k follows k applied inputs
  std::vector<std::vector<double>> goals;  // goal position at each row's time
  bool captured = false;
  int steps = 0;
  SolveStatus status = SolveStatus::kOptimal;  // first non-optimal step status, if any
  std::string diagnostic;
};

/// Receding-horizon loop: replan with a soft goal over `lookahead` steps,
/// apply the first input, repeat until captured, max_steps, or a failed solve.
RhcResult receding_horizon(const MpcScenario& scen, const GoalProcess& goal, const RhcSettings& settings);

struct RoundedTrajectory {
  Trajectory trajectory;
  std::vector<double> distances;  // ||R_t - rounded R_t||_F
  std::vector<bool> unique;
  double dynamics_residual = 0.0;  // after replacing the rotations
};

/// Replaces every rotation state with its nearest proper rotation.
RoundedTrajectory round_trajectory(const Trajectory& traj);

}  // namespace hullmpc
