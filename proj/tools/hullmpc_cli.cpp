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

// hullmpc command-line front end: plan, rhc, project, check.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hullmpc/export.hpp"
#include "hullmpc/orbitope.hpp"
#include "hullmpc/scenario.hpp"

namespace {

using namespace hullmpc;
namespace fs = std::filesystem;

enum Exit : int {
  kOk = 0,
  kError = 1,
  kInfeasible = 2,
  kIterLimit = 3,
  kInvalid = 4,
  kUnbounded = 5,
  kNotCaptured = 6,
  kCheckFailed = 7,
};

int status_exit(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return kOk;
    case SolveStatus::kInfeasible:
      return kInfeasible;
    case SolveStatus::kIterLimit:
      return kIterLimit;
    case SolveStatus::kUnbounded:
      return kUnbounded;
  }
  return kError;
}

struct Outputs {
  std::string csv;
  std::string json;
};

// --out wins, then the scenario's output section, then <name>.csv.
Outputs output_paths(const ScenarioFile& f, const std::string& out, const std::string& fallback_stem) {
  Outputs o;
  const std::string stem = f.name.empty() ? fallback_stem : f.name;
  o.csv = !out.empty() ? out : (!f.trajectory_path.empty() ? f.trajectory_path : stem + ".csv");
  if (!out.empty() || f.summary_path.empty()) {
    o.json = fs::path(o.csv).replace_extension(".json").string();
  } else {
    o.json = f.summary_path;
  }
  return o;
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  os << text;
}

struct Common {
  std::string scenario;
  std::string out;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<std::uint64_t> seed;
  bool no_timing = false;
};

ScenarioFile load(const Common& c) {
  ScenarioFile f = load_scenario(c.scenario);
  if (c.tol) {
    if (!(*c.tol > 0.0)) throw InvalidInput("--tol must be positive");
    f.solver.relax.tol = *c.tol;
  }
  if (c.max_iters) {
    if (*c.max_iters < 1) throw InvalidInput("--max-iters must be at least 1");
    f.solver.relax.max_iters = *c.max_iters;
  }
  if (c.seed) f.seed = *c.seed;
  f.rhc.solver = f.solver;
  return f;
}

int run_plan(const Common& c, const std::string& node_log_path) {
  const ScenarioFile f = load(c);
  MipSettings ms = f.solver;
  std::ofstream node_log;
  if (!node_log_path.empty()) {
    node_log.open(node_log_path);
    if (!node_log) throw std::runtime_error("cannot write '" + node_log_path + "'");
    ms.node_log = &node_log;
  }
  const Trajectory traj = plan(f.mpc, ms);
  const Outputs o = output_paths(f, c.out, fs::path(c.scenario).stem().string());
  std::ostringstream csv;
  write_trajectory_csv(csv, traj, {f.mpc.goal}, !c.no_timing);
  write_file(o.csv, csv.str());
  write_file(o.json, plan_summary_json(f, traj, !c.no_timing));
  std::printf("status %s objective %.10g rows %zu\n", to_string(traj.status).c_str(), traj.objective,
              traj.steps.size());
  if (traj.status != SolveStatus::kOptimal) {
    std::fprintf(stderr,
                 "plan did not reach optimality: status %s, %d solver iterations, %d nodes, best bound %.10g\n",
                 to_string(traj.status).c_str(), traj.iterations, traj.mip.nodes_evaluated, traj.mip.best_bound);
  }
  return status_exit(traj.status);
}

int run_rhc(const Common& c, std::optional<int> lookahead, std::optional<int> max_steps) {
  ScenarioFile f = load(c);
  if (lookahead) f.rhc.lookahead = *lookahead;
  if (max_steps) f.rhc.max_steps = *max_steps;
  const RhcResult res = receding_horizon(f.mpc, goal_process(f), f.rhc);
  const Outputs o = output_paths(f, c.out, fs::path(c.scenario).stem().string());
  std::ostringstream csv;
  write_trajectory_csv(csv, res.executed, res.goals, !c.no_timing);
  write_file(o.csv, csv.str());
  write_file(o.json, rhc_summary_json(f, res, !c.no_timing));
  std::printf("captured %s steps %d status %s\n", res.captured ? "yes" : "no", res.steps,
              to_string(res.status).c_str());
  if (!res.diagnostic.empty()) std::fprintf(stderr, "%s\n", res.diagnostic.c_str());
  if (res.captured) return kOk;
  if (res.status != SolveStatus::kOptimal) return status_exit(res.status);
  return kNotCaptured;
}

// Rows separated by ';' or newlines, entries by ',' or whitespace.
SmallMatrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::string norm = text;
  for (char& ch : norm) {
    if (ch == ';') ch = '\n';
    if (ch == ',') ch = ' ';
  }
  std::istringstream in(norm);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw InvalidInput("matrix: bad entry '" + tok + "'");
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n != 2 && n != 3) throw InvalidInput("matrix: expected a 2x2 or 3x3 matrix");
  SmallMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) throw InvalidInput("matrix: ragged rows");
    for (int j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

int run_project(const std::string& literal, const std::string& file) {
  std::string text = literal;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw InvalidInput("cannot open '" + file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (text.empty()) throw InvalidInput("project: give a matrix literal or --file");
  const RotationProjection p = project_to_SOn(parse_matrix(text));
  std::printf("rotation\n");
  for (int i = 0; i < p.rotation.rows(); ++i) {
    for (int j = 0; j < p.rotation.cols(); ++j) std::printf("%s%.17g", j ? " " : "", p.rotation(i, j));
    std::printf("\n");
  }
  std::printf("distance %.17g\nunique %s\n", p.distance, p.unique ? "true" : "false");
  return kOk;
}

int run_check(const std::string& scenario, const std::string& csv_path, double tol) {
  const ScenarioFile f = load_scenario(scenario);
  std::ifstream in(csv_path);
  if (!in) throw InvalidInput("cannot open '" + csv_path + "'");
  const TrajectoryTable table = read_trajectory_csv(in, f.mpc);
  const CheckReport r = check_trajectory(table, tol);
  std::printf("rows %d dynamics_residual %.3e hull_violation %.3e min_det %.10g terminal_error %.3e %s\n", r.rows,
              r.dynamics_residual, r.hull_violation, r.min_det, r.terminal_error, r.passed ? "PASS" : "FAIL");
  return r.passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory planning over convex hulls of rotation groups"};
  app.require_subcommand(1);

  Common plan_opts, rhc_opts;
  std::string node_log;
  auto add_common = [](CLI::App* sub, Common& c) {
    sub->add_option("scenario", c.scenario, "Scenario file (YAML)")->required();
    sub->add_option("--out", c.out, "Trajectory CSV path; the JSON summary goes next to it");
    sub->add_option("--tol", c.tol, "Solver tolerance");
    sub->add_option("--max-iters", c.max_iters, "Solver iteration limit per relaxation");
    sub->add_option("--seed", c.seed, "Seed recorded in the summary (the pipeline is deterministic)");
    sub->add_flag("--no-timing", c.no_timing, "Write zero timings so outputs are byte-reproducible");
  };

  auto* plan_cmd = app.add_subcommand("plan", "One-shot plan over the full horizon");
  add_common(plan_cmd, plan_opts);
  plan_cmd->add_option("--node-log", node_log, "Branch-and-bound node log (CSV)");

  auto* rhc_cmd = app.add_subcommand("rhc", "Closed-loop receding-horizon run");
  add_common(rhc_cmd, rhc_opts);
  std::optional<int> lookahead, max_steps;
  rhc_cmd->add_option("--lookahead", lookahead, "Planning horizon of each replan");
  rhc_cmd->add_option("--max-steps", max_steps, "Closed-loop step limit");

  auto* project_cmd = app.add_subcommand("project", "Nearest rotation to a matrix");
  std::string literal, matrix_file;
  project_cmd->add_option("matrix", literal, "Matrix literal, rows separated by ';' (e.g. \"1,0;0,1\")");
  project_cmd->add_option("--file", matrix_file, "Read the matrix from a file instead");

  auto* check_cmd = app.add_subcommand("check", "Re-validate an exported trajectory");
  std::string check_scenario, check_csv;
  double check_tol = 1e-6;
  check_cmd->add_option("scenario", check_scenario, "Scenario the trajectory was produced from")->required();
  check_cmd->add_option("trajectory", check_csv, "Exported trajectory CSV")->required();
  check_cmd->add_option("--tol", check_tol, "Allowed dynamics residual and hull violation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*plan_cmd) return run_plan(plan_opts, node_log);
    if (*rhc_cmd) return run_rhc(rhc_opts, lookahead, max_steps);
    if (*project_cmd) return run_project(literal, matrix_file);
    if (*check_cmd) return run_check(check_scenario, check_csv, check_tol);
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kError;
}
