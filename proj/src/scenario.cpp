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

#include "hullmpc/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace hullmpc {

ScenarioError::ScenarioError(const std::string& source, int line, int column, const std::string& key_path,
                             const std::string& message)
    : InvalidInput(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                   (key_path.empty() ? std::string("<root>") : key_path) + ": " + message),
      line_(line),
      column_(column),
      key_path_(key_path) {}

std::string to_string(BranchingRule rule) {
  return rule == BranchingRule::kMostFractional ? "most_fractional" : "violated";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& path, const std::string& msg) const {
    const YAML::Mark m = at.Mark();
    throw ScenarioError(source_, m.line + 1, m.column + 1, path, msg);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  void expect_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
  }

  // Rejects keys outside `allowed`, reporting the offending key's position.
  void check_keys(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> allowed) const {
    expect_map(map, path);
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      const bool ok = std::any_of(allowed.begin(), allowed.end(), [&key](const char* a) { return key == a; });
      if (!ok) fail(kv.first, join(path, key), "unknown key");
    }
  }

  double number(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a number");
    double v = 0.0;
    if (!YAML::convert<double>::decode(node, v) || !std::isfinite(v)) fail(node, path, "expected a finite number");
    return v;
  }

  int integer(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected an integer");
    long long v = 0;
    if (!YAML::convert<long long>::decode(node, v)) fail(node, path, "expected an integer");
    if (v < -2147483647LL || v > 2147483647LL) fail(node, path, "integer out of range");
    return static_cast<int>(v);
  }

  std::uint64_t unsigned_integer(const YAML::Node& node, const std::string& path) const {
    std::uint64_t v = 0;
    if (!node.IsScalar() || node.Scalar().starts_with("-") || !YAML::convert<std::uint64_t>::decode(node, v)) {
      fail(node, path, "expected a nonnegative integer");
    }
    return v;
  }

  bool boolean(const YAML::Node& node, const std::string& path) const {
    bool v = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, v)) fail(node, path, "expected true or false");
    return v;
  }

  std::string text(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path, "expected a string");
    return node.Scalar();
  }

  std::vector<double> vector(const YAML::Node& node, const std::string& path, int size) const {
    if (!node.IsSequence()) fail(node, path, "expected a list of numbers");
    if (size >= 0 && static_cast<int>(node.size()) != size) {
      fail(node, path, "expected " + std::to_string(size) + " entries, got " + std::to_string(node.size()));
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  // A scalar c means c * I; otherwise a list of `dim` rows.
  SmallMatrix matrix(const YAML::Node& node, const std::string& path, int dim) const {
    if (node.IsScalar()) {
      SmallMatrix m = SmallMatrix::identity(dim);
      const double c = number(node, path);
      for (int i = 0; i < dim; ++i) m(i, i) = c;
      return m;
    }
    if (!node.IsSequence() || static_cast<int>(node.size()) != dim) {
      fail(node, path, "expected a number or a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    }
    SmallMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      const auto row = vector(node[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]", dim);
      for (int j = 0; j < dim; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
  }

 private:
  std::string source_;
};

void read_vehicle(const Reader& rd, const YAML::Node& node, MpcScenario& s) {
  rd.check_keys(node, "vehicle", {"dimension", "order", "body_velocity"});
  if (node["dimension"]) {
    s.n = rd.integer(node["dimension"], "vehicle.dimension");
    if (s.n != 2 && s.n != 3) rd.fail(node["dimension"], "vehicle.dimension", "must be 2 or 3");
  }
  if (node["order"]) {
    const std::string o = rd.text(node["order"], "vehicle.order");
    if (o == "first") {
      s.order = DynamicsOrder::kFirst;
    } else if (o == "second") {
      s.order = DynamicsOrder::kSecond;
    } else {
      rd.fail(node["order"], "vehicle.order", "expected 'first' or 'second'");
    }
  }
}

void read_constraints(const Reader& rd, const YAML::Node& node, MpcScenario& s) {
  rd.check_keys(node, "constraints", {"obstacles", "obstacle_big_m", "min_speed", "min_speed_big_m", "input_bounds"});
  if (const auto obs = node["obstacles"]) {
    if (!obs.IsSequence()) rd.fail(obs, "constraints.obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string p = "constraints.obstacles[" + std::to_string(i) + "]";
      rd.check_keys(obs[i], p, {"x_min", "y_min", "x_max", "y_max"});
      RectObstacle o;
      for (const char* k : {"x_min", "y_min", "x_max", "y_max"}) {
        if (!obs[i][k]) rd.fail(obs[i], Reader::join(p, k), "missing required key");
      }
      o.x_min = rd.number(obs[i]["x_min"], p + ".x_min");
      o.y_min = rd.number(obs[i]["y_min"], p + ".y_min");
      o.x_max = rd.number(obs[i]["x_max"], p + ".x_max");
      o.y_max = rd.number(obs[i]["y_max"], p + ".y_max");
      s.obstacles.push_back(o);
    }
  }
  if (node["obstacle_big_m"]) s.obstacle_big_m = rd.number(node["obstacle_big_m"], "constraints.obstacle_big_m");
  if (const auto ms = node["min_speed"]) {
    rd.check_keys(ms, "constraints.min_speed", {"min_det", "faces"});
    MinSpeedRegion r;
    if (ms["min_det"]) r.min_det = rd.number(ms["min_det"], "constraints.min_speed.min_det");
    if (ms["faces"]) r.faces = rd.integer(ms["faces"], "constraints.min_speed.faces");
    s.min_speed = r;
  }
  if (node["min_speed_big_m"]) s.min_speed_big_m = rd.number(node["min_speed_big_m"], "constraints.min_speed_big_m");
  if (node["input_bounds"]) {
    const auto b = rd.vector(node["input_bounds"], "constraints.input_bounds", 2);
    s.input_bounds = std::make_pair(b[0], b[1]);
  }
}

void read_solver(const Reader& rd, const YAML::Node& node, MipSettings& m) {
  rd.check_keys(node, "solver",
                {"tol", "max_iters", "rho", "sigma", "alpha", "adaptive_rho", "node_limit", "abs_gap", "rel_gap",
                 "integrality_tol", "branching", "heuristic_interval"});
  auto num = [&](const char* k, double& dst) {
    if (node[k]) dst = rd.number(node[k], Reader::join("solver", k));
  };
  auto integer = [&](const char* k, int& dst) {
    if (node[k]) dst = rd.integer(node[k], Reader::join("solver", k));
  };
  num("tol", m.relax.tol);
  integer("max_iters", m.relax.max_iters);
  num("rho", m.relax.rho);
  num("sigma", m.relax.sigma);
  num("alpha", m.relax.alpha);
  if (node["adaptive_rho"]) m.relax.adaptive_rho = rd.boolean(node["adaptive_rho"], "solver.adaptive_rho");
  integer("node_limit", m.node_limit);
  num("abs_gap", m.abs_gap);
  num("rel_gap", m.rel_gap);
  num("integrality_tol", m.integrality_tol);
  integer("heuristic_interval", m.heuristic_interval);
  if (node["branching"]) {
    const std::string b = rd.text(node["branching"], "solver.branching");
    if (b == "most_fractional") {
      m.branching = BranchingRule::kMostFractional;
    } else if (b == "violated") {
      m.branching = BranchingRule::kViolated;
    } else {
      rd.fail(node["branching"], "solver.branching", "expected 'most_fractional' or 'violated'");
    }
  }
  if (!(m.relax.tol > 0.0)) rd.fail(node["tol"], "solver.tol", "must be positive");
  if (m.relax.max_iters < 1) rd.fail(node["max_iters"], "solver.max_iters", "must be at least 1");
  if (m.node_limit < 1) rd.fail(node["node_limit"], "solver.node_limit", "must be at least 1");
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text, const std::string& source) {
  const Reader rd(source);
  YAML::Node loaded;
  try {
    loaded = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ScenarioError(source, e.mark.line + 1, e.mark.column + 1, "", e.msg);
  }
  const YAML::Node root = loaded;
  rd.check_keys(root, "",
                {"name", "horizon", "time_step", "seed", "vehicle", "initial", "goal", "cost", "constraints", "solver",
                 "rhc", "output"});

  ScenarioFile f;
  MpcScenario& s = f.mpc;
  if (root["name"]) f.name = rd.text(root["name"], "name");
  if (root["seed"]) f.seed = rd.unsigned_integer(root["seed"], "seed");
  if (root["horizon"]) {
    s.horizon = rd.integer(root["horizon"], "horizon");
    if (s.horizon < 1) rd.fail(root["horizon"], "horizon", "must be at least 1");
  }
  if (root["time_step"]) {
    s.time_step = rd.number(root["time_step"], "time_step");
    if (!(s.time_step > 0.0)) rd.fail(root["time_step"], "time_step", "must be positive");
  }
  if (root["vehicle"]) read_vehicle(rd, root["vehicle"], s);

  // Dimension-dependent defaults once n is known.
  const int n = s.n;
  const int d = rotation_dim(n);
  s.body_velocity.assign(static_cast<std::size_t>(n), 0.0);
  s.body_velocity[0] = 1.0;
  s.state_weight = SmallMatrix::zeros(n, n);
  s.input_weight = SmallMatrix::identity(d);
  s.terminal_weight = SmallMatrix::zeros(n, n);
  s.initial_position.assign(static_cast<std::size_t>(n), 0.0);
  s.initial_rotation = SmallMatrix::identity(n);
  s.goal.clear();

  if (const auto v = root["vehicle"]; v && v["body_velocity"]) {
    s.body_velocity = rd.vector(v["body_velocity"], "vehicle.body_velocity", n);
  }
  if (const auto init = root["initial"]) {
    rd.check_keys(init, "initial", {"position", "rotation", "velocity", "rotation_rate"});
    if (init["position"]) s.initial_position = rd.vector(init["position"], "initial.position", n);
    if (init["rotation"]) s.initial_rotation = rd.matrix(init["rotation"], "initial.rotation", n);
    if (init["velocity"]) s.initial_velocity = rd.vector(init["velocity"], "initial.velocity", n);
    if (init["rotation_rate"]) s.initial_rotation_rate = rd.matrix(init["rotation_rate"], "initial.rotation_rate", n);
  }
  const auto goal = root["goal"];
  if (!goal) rd.fail(root, "goal", "missing required key");
  rd.check_keys(goal, "goal", {"mode", "position", "zero_velocity", "oscillation"});
  if (!goal["position"]) rd.fail(goal, "goal.position", "missing required key");
  s.goal = rd.vector(goal["position"], "goal.position", n);
  if (goal["mode"]) {
    const std::string m = rd.text(goal["mode"], "goal.mode");
    if (m == "hard") {
      s.goal_mode = GoalMode::kHard;
    } else if (m == "soft") {
      s.goal_mode = GoalMode::kSoft;
    } else {
      rd.fail(goal["mode"], "goal.mode", "expected 'hard' or 'soft'");
    }
  }
  if (goal["zero_velocity"]) s.zero_terminal_velocity = rd.boolean(goal["zero_velocity"], "goal.zero_velocity");
  if (const auto osc = goal["oscillation"]) {
    rd.check_keys(osc, "goal.oscillation", {"amplitude", "omega"});
    if (!osc["amplitude"]) rd.fail(osc, "goal.oscillation.amplitude", "missing required key");
    if (!osc["omega"]) rd.fail(osc, "goal.oscillation.omega", "missing required key");
    f.moving_goal = OscillatingGoal{rd.vector(osc["amplitude"], "goal.oscillation.amplitude", n),
                                    rd.number(osc["omega"], "goal.oscillation.omega")};
  }
  if (const auto cost = root["cost"]) {
    rd.check_keys(cost, "cost", {"state", "input", "terminal"});
    if (cost["state"]) s.state_weight = rd.matrix(cost["state"], "cost.state", n);
    if (cost["input"]) s.input_weight = rd.matrix(cost["input"], "cost.input", d);
    if (cost["terminal"]) s.terminal_weight = rd.matrix(cost["terminal"], "cost.terminal", n);
  }
  if (root["constraints"]) read_constraints(rd, root["constraints"], s);
  if (root["solver"]) read_solver(rd, root["solver"], f.solver);
  f.rhc.solver = f.solver;
  if (const auto rhc = root["rhc"]) {
    rd.check_keys(rhc, "rhc", {"lookahead", "max_steps", "capture_radius"});
    if (rhc["lookahead"]) f.rhc.lookahead = rd.integer(rhc["lookahead"], "rhc.lookahead");
    if (rhc["max_steps"]) f.rhc.max_steps = rd.integer(rhc["max_steps"], "rhc.max_steps");
    if (rhc["capture_radius"]) f.rhc.capture_radius = rd.number(rhc["capture_radius"], "rhc.capture_radius");
  }
  if (const auto out = root["output"]) {
    rd.check_keys(out, "output", {"trajectory", "summary"});
    if (out["trajectory"]) f.trajectory_path = rd.text(out["trajectory"], "output.trajectory");
    if (out["summary"]) f.summary_path = rd.text(out["summary"], "output.summary");
  }

  // Semantic checks reuse the model's validation; the message keeps the source.
  try {
    validate(s);
  } catch (const InvalidInput& e) {
    throw ScenarioError(source, 1, 1, "", e.what());
  }
  return f;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

GoalProcess goal_process(const ScenarioFile& file) {
  if (file.moving_goal) return oscillating_goal(file.mpc.goal, file.moving_goal->amplitude, file.moving_goal->omega);
  return static_goal(file.mpc.goal);
}

}  // namespace hullmpc
