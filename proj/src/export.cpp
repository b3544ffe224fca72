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

#include "hullmpc/export.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace hullmpc {

namespace {

constexpr int kPad = 3;

void matrix_columns(std::vector<std::string>& cols, char prefix) {
  for (int i = 1; i <= kPad; ++i)
    for (int j = 1; j <= kPad; ++j) cols.push_back(std::string(1, prefix) + std::to_string(i) + std::to_string(j));
}

void vector_columns(std::vector<std::string>& cols, char prefix) {
  for (const char* axis : {"_x", "_y", "_z"}) cols.push_back(std::string(1, prefix) + axis);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_matrix(std::vector<double>& row, const SmallMatrix& m) {
  for (int i = 0; i < kPad; ++i)
    for (int j = 0; j < kPad; ++j) row.push_back(i < m.rows() && j < m.cols() ? m(i, j) : 0.0);
}

void put_vector(std::vector<double>& row, const std::vector<double>& v) {
  for (int i = 0; i < kPad; ++i) row.push_back(static_cast<std::size_t>(i) < v.size() ? v[static_cast<std::size_t>(i)] : 0.0);
}

SmallMatrix take_matrix(const std::vector<double>& row, std::size_t at, int n) {
  SmallMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = row[at + static_cast<std::size_t>(i * kPad + j)];
  return m;
}

std::vector<double> take_vector(const std::vector<double>& row, std::size_t at, int n) {
  return {row.begin() + static_cast<std::ptrdiff_t>(at), row.begin() + static_cast<std::ptrdiff_t>(at) + n};
}

nlohmann::json stats_json(const MipStats& s, bool timing) {
  return {{"nodes_evaluated", s.nodes_evaluated},
          {"nodes_branched", s.nodes_branched},
          {"nodes_infeasible", s.nodes_infeasible},
          {"nodes_pruned", s.nodes_pruned},
          {"nodes_unresolved", s.nodes_unresolved},
          {"incumbent_updates", s.incumbent_updates},
          {"heuristic_solves", s.heuristic_solves},
          {"max_depth", s.max_depth},
          {"best_bound", std::isfinite(s.best_bound) ? nlohmann::json(s.best_bound) : nlohmann::json()},
          {"seconds", timing ? s.seconds : 0.0}};
}

double last_distance(const Trajectory& traj, const std::vector<double>& goal) {
  if (traj.steps.empty()) return 0.0;
  const auto& p = traj.steps.back().position;
  double sq = 0.0;
  for (std::size_t i = 0; i < p.size() && i < goal.size(); ++i) sq += (p[i] - goal[i]) * (p[i] - goal[i]);
  return std::sqrt(sq);
}

nlohmann::json trajectory_json(const Trajectory& traj) {
  nlohmann::json j;
  j["rows"] = traj.steps.size();
  if (!traj.steps.empty()) {
    j["min_det"] = traj.min_det();
    j["max_det"] = traj.max_det();
    j["path_length"] = traj.path_length();
    j["terminal_position"] = traj.steps.back().position;
    j["dynamics_residual"] = dynamics_residual(traj);
    j["hull_violation"] = hull_violation(traj);
  }
  return j;
}

}  // namespace

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t", "time"};
    matrix_columns(c, 'r');
    vector_columns(c, 's');
    vector_columns(c, 'p');
    matrix_columns(c, 'w');
    matrix_columns(c, 'u');
    vector_columns(c, 'g');
    c.insert(c.end(), {"det", "solve_iterations", "solve_time_s"});
    return c;
  }();
  return cols;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::vector<double>>& goals,
                          bool timing) {
  if (!goals.empty() && goals.size() != 1 && goals.size() != traj.steps.size()) {
    throw InvalidInput("write_trajectory_csv: need one goal or one per row");
  }
  const auto& cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const TrajectoryStep& s = traj.steps[k];
    std::vector<double> row;
    put_matrix(row, s.rotation);
    put_vector(row, s.position);
    put_vector(row, s.velocity);
    put_matrix(row, s.rate);
    put_matrix(row, s.input);
    put_vector(row, goals.empty() ? std::vector<double>{} : goals[goals.size() == 1 ? 0 : k]);
    os << s.t << ',' << fmt(s.time);
    for (double v : row) os << ',' << fmt(v);
    os << ',' << fmt(s.det) << ',' << s.solve_iterations << ',' << fmt(timing ? s.solve_seconds : 0.0) << '\n';
  }
}

TrajectoryTable read_trajectory_csv(std::istream& is, const MpcScenario& scen) {
  const auto& cols = trajectory_columns();
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("trajectory table: empty input");
  {
    std::string expected;
    for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
    if (line != expected) throw InvalidInput("trajectory table: unexpected header");
  }
  TrajectoryTable out;
  Trajectory& traj = out.trajectory;
  traj.n = scen.n;
  traj.order = scen.order;
  traj.time_step = scen.time_step;
  traj.body_velocity = scen.body_velocity;
  const int n = scen.n;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double d = 0.0;
      try {
        d = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || !std::isfinite(d)) {
        throw InvalidInput("trajectory table: line " + std::to_string(line_no) + ": bad value '" + cell + "'");
      }
      v.push_back(d);
    }
    if (v.size() != cols.size()) {
      throw InvalidInput("trajectory table: line " + std::to_string(line_no) + ": expected " +
                         std::to_string(cols.size()) + " values");
    }
    TrajectoryStep s;
    s.t = static_cast<int>(v[0]);
    s.time = v[1];
    std::size_t at = 2;
    s.rotation = take_matrix(v, at, n);
    s.position = take_vector(v, at + 9, n);
    if (scen.order == DynamicsOrder::kSecond) {
      s.velocity = take_vector(v, at + 12, n);
      s.rate = take_matrix(v, at + 15, n);
    }
    s.input = take_matrix(v, at + 24, n);
    out.goals.push_back(take_vector(v, at + 33, n));
    s.det = v[at + 36];
    s.solve_iterations = static_cast<int>(v[at + 37]);
    s.solve_seconds = v[at + 38];
    traj.steps.push_back(std::move(s));
  }
  return out;
}

std::string plan_summary_json(const ScenarioFile& file, const Trajectory& traj, bool timing) {
  nlohmann::json j = trajectory_json(traj);
  j["command"] = "plan";
  j["name"] = file.name;
  j["seed"] = file.seed;
  j["status"] = to_string(traj.status);
  j["objective"] = traj.objective;
  j["iterations"] = traj.iterations;
  j["terminal_error"] = last_distance(traj, file.mpc.goal);
  j["wall_seconds"] = timing ? traj.wall_seconds : 0.0;
  j["branch_and_bound"] = stats_json(traj.mip, timing);
  return j.dump(2) + "\n";
}

std::string rhc_summary_json(const ScenarioFile& file, const RhcResult& res, bool timing) {
  nlohmann::json j = trajectory_json(res.executed);
  j["command"] = "rhc";
  j["name"] = file.name;
  j["seed"] = file.seed;
  j["status"] = to_string(res.status);
  j["captured"] = res.captured;
  j["steps"] = res.steps;
  j["diagnostic"] = res.diagnostic;
  j["lookahead"] = file.rhc.lookahead;
  j["capture_radius"] = file.rhc.capture_radius;
  j["terminal_error"] = res.goals.empty() ? 0.0 : last_distance(res.executed, res.goals.back());
  double total = 0.0, worst = 0.0;
  for (const auto& s : res.executed.steps) {
    total += s.solve_seconds;
    worst = std::max(worst, s.solve_seconds);
  }
  j["solve_seconds_total"] = timing ? total : 0.0;
  j["solve_seconds_max"] = timing ? worst : 0.0;
  j["wall_seconds"] = timing ? res.executed.wall_seconds : 0.0;
  return j.dump(2) + "\n";
}

CheckReport check_trajectory(const TrajectoryTable& table, double tol) {
  CheckReport r;
  const Trajectory& traj = table.trajectory;
  r.rows = static_cast<int>(traj.steps.size());
  if (traj.steps.empty()) {
    r.passed = true;
    return r;
  }
  r.dynamics_residual = dynamics_residual(traj);
  r.hull_violation = hull_violation(traj);
  r.min_det = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.steps) r.min_det = std::min(r.min_det, determinant(s.rotation));
  if (!table.goals.empty()) r.terminal_error = last_distance(traj, table.goals.back());
  r.passed = r.dynamics_residual <= tol && r.hull_violation <= tol;
  return r;
}

}  // namespace hullmpc
