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

#include <optional>
#include <string>
#include <vector>

#include "hullmpc/conic_program.hpp"

namespace hullmpc {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

std::string to_string(SolveStatus status);

/// Primal-dual starting point. `s` and `y` cover every internal row: the
/// program's constraint blocks in order followed by one row per finite
/// variable bound (upper bounds first for each variable, then lower).
struct WarmStart {
  std::vector<double> x;
  std::vector<double> s;
  std::vector<double> y;
  double rho = 0.0;  // 0 keeps the configured rho
};

struct SolverSettings {
  double tol = 1e-6;
  int max_iters = 50000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  bool adaptive_rho = true;
  int adapt_interval = 50;
  int check_interval = 5;
  int scaling_iters = 10;
  double infeasibility_tol = 1e-5;
  std::optional<WarmStart> warm;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kIterLimit;
  std::vector<double> x;
  std::vector<double> s;
  std::vector<double> y;  // dual multipliers, y in K*
  double objective = 0.0;
  /// Residuals are normalized: ||r||_inf / (1 + scale of the terms).
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double final_rho = 0.0;
  bool warm_started = false;
  bool warm_start_rejected = false;
  double solve_seconds = 0.0;
};

/// Builds a warm start from a previous result. When the variable layout
/// does not match, the returned fragment is still usable: the solver then
/// falls back to a cold start and flags it.
WarmStart warm_start(const SolveResult& prev, const ConicProgram& prog);

/// Solves the continuous program. Binary markers must be absent; call
/// solve_mip for programs that carry them.
SolveResult solve(const ConicProgram& prog, const SolverSettings& settings = {});

/// Number of internal rows the solver uses for `prog` (blocks + bound rows).
int internal_row_count(const ConicProgram& prog);

}  // namespace hullmpc
