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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hullmpc/error.hpp"
#include "hullmpc/mpc.hpp"

namespace hullmpc {

/// Schema violation in a scenario file. what() reads
/// "<source>:<line>:<col>: <key.path>: <message>".
class ScenarioError : public InvalidInput {
 public:
  ScenarioError(const std::string& source, int line, int column, const std::string& key_path,
                const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& key_path() const { return key_path_; }

 private:
  int line_;
  int column_;
  std::string key_path_;
};

/// Goal that moves as center + amplitude * (sin, cos, sin)(omega t).
struct OscillatingGoal {
  std::vector<double> amplitude;
  double omega = 0.0;
};

struct ScenarioFile {
  std::string name;
  MpcScenario mpc;
  MipSettings solver;  // no callbacks or log stream; plan() installs the completion heuristic
  RhcSettings rhc;
  std::optional<OscillatingGoal> moving_goal;
  std::string trajectory_path;  // empty: derived from the scenario name
  std::string summary_path;
  std::uint64_t seed = 0;
};

/// Parses a YAML scenario. `source` names the document in error messages.
ScenarioFile parse_scenario(const std::string& text, const std::string& source = "<scenario>");
ScenarioFile load_scenario(const std::string& path);

/// Goal process for closed-loop runs: oscillating when configured, static otherwise.
GoalProcess goal_process(const ScenarioFile& file);

std::string to_string(BranchingRule rule);

}  // namespace hullmpc
