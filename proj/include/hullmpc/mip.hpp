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
#include <span>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "hullmpc/conic_program.hpp"
#include "hullmpc/solver.hpp"

namespace hullmpc {

/// Axis-aligned rectangle the vehicle's (x, y) must stay out of.
struct RectObstacle {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

/// Excluded regular N-gon around the origin of the planar hull (a, b). Its
/// inradius is sqrt(min_det), so every admissible point has
/// a^2 + b^2 >= min_det.
struct MinSpeedRegion {
  double min_det = 0.5;
  int faces = 4;
};

void validate(const RectObstacle& obstacle);
void validate(const MinSpeedRegion& region);

/// Default big-M for obstacle rows (scenario coordinates stay within |30|).
inline constexpr double kDefaultObstacleBigM = 100.0;
/// Default big-M for minimum-speed rows. Face values of points in the unit
/// disk are >= -1 and the inradius is < 1, so 2 relaxes any face.
inline constexpr double kDefaultMinSpeedBigM = 2.0;

/// Appends four binaries a_k and five rows:
///   x <= x_min + M a1,  -x <= -x_max + M a2,
///   y <= y_min + M a3,  -y <= -y_max + M a4,  a1 + a2 + a3 + a4 <= 3.
/// Returns the binary indices.
std::array<int, 4> add_obstacle(ConicProgram& prog, const RectObstacle& obstacle, int x_index, int y_index,
                                double big_m = kDefaultObstacleBigM);

/// Appends N binaries c_k and N + 1 rows:
///   cos(t_k) a + sin(t_k) b >= sqrt(min_det) - M c_k,  t_k = 2 pi k / N,
///   sum_k c_k <= N - 1.
/// Returns the binary indices.
std::vector<int> add_min_speed(ConicProgram& prog, const MinSpeedRegion& region, int a_index, int b_index,
                               double big_m = kDefaultMinSpeedBigM);

enum class BranchingRule {
  kMostFractional,  // most fractional binary, lowest index on ties
  kViolated,        // most fractional binary in a row the completed relaxation point violates
};

struct MipSettings {
  SolverSettings relax;
  /// kViolated needs `heuristic` as the completion rule; without one it
  /// behaves like kMostFractional.
  BranchingRule branching = BranchingRule::kViolated;
  int node_limit = 200000;
  double abs_gap = 1e-6;
  double rel_gap = 1e-6;
  double integrality_tol = 1e-6;
  /// Optional primal heuristic: maps a relaxation solution to a complete
  /// binary assignment (variable, value). The assignment is fixed and the
  /// continuous program solved; an Optimal result becomes a candidate
  /// incumbent. Called at the root and every `heuristic_interval` nodes.
  std::function<std::vector<std::pair<int, int>>(std::span<const double> x)> heuristic;
  int heuristic_interval = 25;
  /// Optional CSV node log: node,parent,depth,branch_var,branch_value,status,bound,incumbent,iterations
  std::ostream* node_log = nullptr;
};

/// A node of the search tree: binaries fixed so far and the relaxation bound.
struct BnbNode {
  std::vector<std::pair<int, int>> fixed;  // (variable, value)
  double bound = 0.0;
  int depth = 0;
  int id = 0;
  int parent = -1;
};

struct MipStats {
  int nodes_evaluated = 0;
  int nodes_branched = 0;
  int nodes_infeasible = 0;
  int nodes_pruned = 0;
  int nodes_unresolved = 0;
  int incumbent_updates = 0;
  int heuristic_solves = 0;
  int heuristic_successes = 0;
  int max_depth = 0;
  double best_bound = 0.0;  // proven lower bound on the optimum
  double seconds = 0.0;
};

struct MipResult {
  SolveResult result;
  MipStats stats;
};

/// Branch and bound over prog.binaries() with conic relaxations.
///
/// Branches on the most fractional binary (lowest index on ties) and
/// explores nodes best-bound first, preferring deeper nodes and then older
/// ones on ties. Without binaries this reduces to solve().
MipResult solve_mip(const ConicProgram& prog, const MipSettings& settings = {});

}  // namespace hullmpc
