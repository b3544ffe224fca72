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

#include <iosfwd>
#include <string>
#include <vector>

#include "hullmpc/mpc.hpp"
#include "hullmpc/scenario.hpp"

namespace hullmpc {

/// Fixed CSV header. Matrices are padded to 3x3 and vectors to length 3
/// with zeros so the column order does not depend on the scenario:
/// t,time,r11..r33,s_x,s_y,s_z,p_x,p_y,p_z,w11..w33,u11..u33,g_x,g_y,g_z,det,solve_iterations,solve_time_s
/// (r rotation, s position, p velocity, w rotation rate, u input, g goal).
const std::vector<std::string>& trajectory_columns();

/// One row per step, values printed with %.17g so they read back exactly.
/// `goals` holds one goal per row, or a single goal used for every row.
/// Without `timing` the solve time column is written as 0.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::vector<double>>& goals,
                          bool timing);

struct TrajectoryTable {
  Trajectory trajectory;
  std::vector<std::vector<double>> goals;
};

/// Inverse of write_trajectory_csv for the vehicle described by `scen`.
/// Throws InvalidInput on a wrong header, ragged rows or non-finite values.
TrajectoryTable read_trajectory_csv(std::istream& is, const MpcScenario& scen);

/// JSON sidecars. Timing fields are zero when `timing` is false so repeated
/// runs produce identical bytes.
std::string plan_summary_json(const ScenarioFile& file, const Trajectory& traj, bool timing);
std::string rhc_summary_json(const ScenarioFile& file, const RhcResult& res, bool timing);

struct CheckReport {
  int rows = 0;
  double dynamics_residual = 0.0;
  double hull_violation = 0.0;
  double min_det = 0.0;
  double terminal_error = 0.0;  // distance from the last position to the last goal
  bool passed = false;
};

/// Offline re-validation of an exported table: dynamics residual and hull
/// violation must both stay within `tol`.
CheckReport check_trajectory(const TrajectoryTable& table, double tol);

}  // namespace hullmpc
