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

#include "hullmpc/mip.hpp"

#include <algorithm>
#include <chrono>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "hullmpc/error.hpp"

namespace hullmpc {

void validate(const RectObstacle& o) {
  if (!std::isfinite(o.x_min) || !std::isfinite(o.x_max) || !std::isfinite(o.y_min) || !std::isfinite(o.y_max) ||
      !(o.x_min < o.x_max) || !(o.y_min < o.y_max)) {
    throw InvalidInput("obstacle needs finite corners with x_min < x_max and y_min < y_max");
  }
}

void validate(const MinSpeedRegion& r) {
  if (!(r.min_det > 0.0)) throw InvalidInput("min_speed: min_det must be positive");
  if (!(r.min_det < 1.0)) throw InvalidInput("min_speed: min_det must be < 1 (the unit disk leaves nothing admissible)");
  if (r.faces < 4 || r.faces % 2 != 0) throw InvalidInput("min_speed: faces must be an even integer >= 4");
}

namespace {
void check_big_m(double big_m) {
  if (!(big_m > 0.0) || !std::isfinite(big_m)) throw InvalidInput("big-M must be a positive finite number");
}
}  // namespace

std::array<int, 4> add_obstacle(ConicProgram& prog, const RectObstacle& o, int x_index, int y_index, double big_m) {
  validate(o);
  check_big_m(big_m);
  if (x_index < 0 || x_index >= prog.num_vars() || y_index < 0 || y_index >= prog.num_vars()) {
    throw InvalidInput("add_obstacle: point index out of range");
  }
  const int first = prog.add_variables(4);
  std::array<int, 4> bin{first, first + 1, first + 2, first + 3};
  for (int v : bin) prog.mark_binary(v);

  // Rows in A x + s = b, s >= 0 form: (A x <= b).
  ConstraintBlock blk;
  blk.cone = Cone::nonnegative(5);
  blk.label = "obstacle";
  blk.b = {o.x_min, -o.x_max, o.y_min, -o.y_max, 3.0};
  blk.a = {{0, x_index, 1.0}, {0, bin[0], -big_m},   //
           {1, x_index, -1.0}, {1, bin[1], -big_m},  //
           {2, y_index, 1.0}, {2, bin[2], -big_m},   //
           {3, y_index, -1.0}, {3, bin[3], -big_m},  //
           {4, bin[0], 1.0}, {4, bin[1], 1.0}, {4, bin[2], 1.0}, {4, bin[3], 1.0}};
  prog.add_block(std::move(blk));
  return bin;
}

std::vector<int> add_min_speed(ConicProgram& prog, const MinSpeedRegion& region, int a_index, int b_index,
                               double big_m) {
  validate(region);
  check_big_m(big_m);
  if (a_index < 0 || a_index >= prog.num_vars() || b_index < 0 || b_index >= prog.num_vars()) {
    throw InvalidInput("add_min_speed: rotation index out of range");
  }
  const int n = region.faces;
  const int first = prog.add_variables(n);
  std::vector<int> bin(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    bin[static_cast<std::size_t>(k)] = first + k;
    prog.mark_binary(first + k);
  }
  const double inradius = std::sqrt(region.min_det);
  ConstraintBlock blk;
  blk.cone = Cone::nonnegative(n + 1);
  blk.label = "min_speed";
  blk.b.assign(static_cast<std::size_t>(n + 1), -inradius);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    // Exact zeros for axis-aligned faces keep the square rows sparse.
    double c = std::cos(theta), s = std::sin(theta);
    if (std::abs(c) < 1e-15) c = 0.0;
    if (std::abs(s) < 1e-15) s = 0.0;
    // -(c a + s b) - M c_k <= -r
    if (c != 0.0) blk.a.push_back({k, a_index, -c});
    if (s != 0.0) blk.a.push_back({k, b_index, -s});
    blk.a.push_back({k, bin[static_cast<std::size_t>(k)], -big_m});
    blk.a.push_back({n, bin[static_cast<std::size_t>(k)], 1.0});
  }
  blk.b[static_cast<std::size_t>(n)] = static_cast<double>(n - 1);
  prog.add_block(std::move(blk));
  return bin;
}

namespace {

struct OpenNode {
  BnbNode node;
  SolveResult relaxation;
  int order = 0;
  std::vector<int> candidates;  // preferred branching variables, empty for all
  int group = -1;               // cover group to branch on, -1 for a single binary

};

class BranchAndBound {
 public:
  BranchAndBound(const ConicProgram& prog, const MipSettings& settings)
      : root_(prog.relaxed()), settings_(settings), binaries_(prog.binaries().begin(), prog.binaries().end()) {
    for (std::size_t i = 0; i < root_.blocks().size(); ++i) {
      const auto& a = root_.blocks()[i].a;
      if (std::any_of(a.begin(), a.end(), [&](const Triplet& t) { return prog.binaries().contains(t.col); })) {
        binary_blocks_.push_back(i);
      }
    }
    find_cover_groups(prog);
  }

  MipResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    if (settings_.node_log) {
      *settings_.node_log << "node,parent,depth,branch_var,branch_value,status,bound,incumbent,iterations\n";
    }
    BnbNode root;
    SolveResult root_res = evaluate(root, nullptr, -1, -1);
    if (root_res.status == SolveStatus::kInfeasible || root_res.status == SolveStatus::kUnbounded) {
      MipResult out;
      out.result = std::move(root_res);
      out.stats = stats_;
      out.stats.best_bound = out.result.status == SolveStatus::kUnbounded ? -kInf : kInf;
      return finish(out, t0);
    }
    consider(std::move(root), std::move(root_res), -kInf);

    bool node_limited = false;
    while (!open_.empty()) {
      const std::size_t pick = select_node();
      if (has_incumbent_ && open_[pick].node.bound >= incumbent_.objective - gap_allowance()) break;
      if (stats_.nodes_evaluated >= settings_.node_limit) {
        node_limited = true;
        break;
      }
      OpenNode current = std::move(open_[pick]);
      open_[pick] = std::move(open_.back());
      open_.pop_back();
      branch(current);
    }

    MipResult out;
    double open_bound = kInf;
    const int remaining = static_cast<int>(open_.size());
    for (const OpenNode& o : open_) open_bound = std::min(open_bound, o.node.bound);
    if (has_incumbent_) {
      out.result = incumbent_;
      stats_.nodes_pruned += node_limited ? 0 : remaining;
      stats_.best_bound = std::min(open_bound, incumbent_.objective);
      const bool proven = !node_limited && stats_.nodes_unresolved == 0;
      out.result.status = proven ? SolveStatus::kOptimal : SolveStatus::kIterLimit;
    } else {
      stats_.best_bound = open_bound;
      out.result.status =
          (node_limited || stats_.nodes_unresolved > 0) ? SolveStatus::kIterLimit : SolveStatus::kInfeasible;
    }
    out.stats = stats_;
    return finish(out, t0);
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  MipResult& finish(MipResult& out, std::chrono::steady_clock::time_point t0) {
    out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.result.solve_seconds = out.stats.seconds;
    return out;
  }

  // Best bound first once an incumbent exists. Bounds closer than the gap tolerance count as ties
  // (they differ by solver noise); ties go to the deepest node, then the
  // oldest one.
  std::size_t select_node() const {
    if (!has_incumbent_) {
      // Dive for a first incumbent: deepest node, lowest bound, oldest.
      std::size_t pick = 0;
      for (std::size_t i = 1; i < open_.size(); ++i) {
        const BnbNode& a = open_[i].node;
        const BnbNode& b = open_[pick].node;
        if (a.depth != b.depth ? a.depth > b.depth
                               : (a.bound != b.bound ? a.bound < b.bound : open_[i].order < open_[pick].order)) {
          pick = i;
        }
      }
      return pick;
    }
    double best = kInf;
    for (const OpenNode& o : open_) best = std::min(best, o.node.bound);
    const double tie = std::isfinite(best) ? std::max(settings_.abs_gap, settings_.rel_gap * std::abs(best)) : 0.0;
    std::size_t pick = 0;
    bool found = false;
    for (std::size_t i = 0; i < open_.size(); ++i) {
      const OpenNode& o = open_[i];
      if (o.node.bound > best + tie) continue;
      if (!found || o.node.depth > open_[pick].node.depth ||
          (o.node.depth == open_[pick].node.depth && o.order < open_[pick].order)) {
        pick = i;
        found = true;
      }
    }
    return pick;
  }

  double gap_allowance() const {
    return std::max(settings_.abs_gap, settings_.rel_gap * std::abs(incumbent_.objective));
  }

  SolveResult solve_node(const BnbNode& node, const SolveResult* warm) const {
    ConicProgram prog = root_;
    for (const auto& [var, value] : node.fixed) {
      prog.mutable_lower()[static_cast<std::size_t>(var)] = value;
      prog.mutable_upper()[static_cast<std::size_t>(var)] = value;
    }
    SolverSettings s = settings_.relax;
    if (warm) s.warm = warm_start(*warm, prog);
    return solve(prog, s);
  }

  void record(const BnbNode& node, const SolveResult& res, int branch_var, int branch_value) {
    ++stats_.nodes_evaluated;
    stats_.max_depth = std::max(stats_.max_depth, node.depth);
    if (settings_.node_log) {
      *settings_.node_log << node.id << ',' << node.parent << ',' << node.depth << ',' << branch_var << ','
                          << branch_value << ',' << to_string(res.status) << ','
                          << (res.status == SolveStatus::kInfeasible ? kInf : res.objective) << ','
                          << (has_incumbent_ ? incumbent_.objective : kInf) << ',' << res.iterations << '\n';
    }
  }

  SolveResult evaluate(const BnbNode& node, const SolveResult* warm, int branch_var, int branch_value) {
    SolveResult res = solve_node(node, warm);
    record(node, res, branch_var, branch_value);
    return res;
  }

  // Most fractional binary that is not fixed; -1 when all are integral.
  int pick_branch_variable(const BnbNode& node, const std::vector<double>& x,
                           const std::vector<int>& candidates = {}) const {
    const int c = candidates.empty() ? -1 : most_fractional(node, x, candidates);
    return c >= 0 ? c : most_fractional(node, x, binaries_);
  }

  int most_fractional(const BnbNode& node, const std::vector<double>& x, const std::vector<int>& vars) const {
    int best = -1;
    double best_dist = -1.0;
    for (int v : vars) {
      const bool fixed = std::any_of(node.fixed.begin(), node.fixed.end(), [v](const auto& f) { return f.first == v; });
      if (fixed) continue;
      const double val = x[static_cast<std::size_t>(v)];
      const double frac = std::abs(val - std::round(val));
      if (frac <= settings_.integrality_tol) continue;
      // Distance from 0.5 measures fractionality; strict '>' keeps the lowest index.
      const double score = 0.5 - std::abs(val - std::floor(val) - 0.5);
      if (score > best_dist) {
        best_dist = score;
        best = v;
      }
    }
    return best;
  }

  void try_heuristic(const SolveResult& relaxation) {
    if (!settings_.heuristic || relaxation.status != SolveStatus::kOptimal) return;
    try_fixings(relaxation, settings_.heuristic(relaxation.x));
  }

  // Binaries in rows that the relaxation point violates once `fixings` are
  // applied to it, with the largest violation of their rows. Empty when the
  // completed point is feasible.
  std::map<int, double> violated_binaries(std::vector<double> x,
                                          const std::vector<std::pair<int, int>>& fixings) const {
    for (const auto& [var, value] : fixings) {
      if (var >= 0 && var < root_.num_vars()) x[static_cast<std::size_t>(var)] = value;
    }
    const double tol = std::max(1e-6, 10.0 * settings_.relax.tol);
    std::map<int, double> out;
    for (std::size_t bi : binary_blocks_) {
      const ConstraintBlock& blk = root_.blocks()[bi];
      std::vector<double> slack = blk.b;
      for (const Triplet& t : blk.a) slack[static_cast<std::size_t>(t.row)] -= t.value * x[static_cast<std::size_t>(t.col)];
      std::vector<double> viol(slack.size(), 0.0);
      if (blk.cone.kind == ConeKind::kNonnegative) {
        for (std::size_t r = 0; r < slack.size(); ++r) viol[r] = -slack[r];
      } else {
        const std::vector<double> proj = project_cone(slack, blk.cone);
        double dist = 0.0;
        for (std::size_t r = 0; r < slack.size(); ++r) dist = std::max(dist, std::abs(slack[r] - proj[r]));
        viol.assign(slack.size(), dist);
      }
      for (const Triplet& t : blk.a) {
        const double v = viol[static_cast<std::size_t>(t.row)];
        if (v > tol && std::binary_search(binaries_.begin(), binaries_.end(), t.col)) {
          auto [it, inserted] = out.try_emplace(t.col, v);
          if (!inserted) it->second = std::max(it->second, v);
        }
      }
    }
    return out;
  }

  void try_fixings(const SolveResult& relaxation, const std::vector<std::pair<int, int>>& fixings) {
    if (fixings.empty()) return;
    ConicProgram prog = root_;
    for (const auto& [var, value] : fixings) {
      if (var < 0 || var >= prog.num_vars() || (value != 0 && value != 1)) {
        throw InvalidInput("heuristic returned an invalid binary assignment");
      }
      prog.mutable_lower()[static_cast<std::size_t>(var)] = value;
      prog.mutable_upper()[static_cast<std::size_t>(var)] = value;
    }
    SolverSettings s = settings_.relax;
    s.warm = warm_start(relaxation, prog);
    SolveResult res = solve(prog, s);
    ++stats_.heuristic_solves;
    if (res.status != SolveStatus::kOptimal) return;
    for (int v : binaries_) {
      const double val = res.x[static_cast<std::size_t>(v)];
      if (std::abs(val - std::round(val)) > settings_.integrality_tol) return;
    }
    if (!has_incumbent_ || res.objective < incumbent_.objective) {
      incumbent_ = std::move(res);
      has_incumbent_ = true;
      ++stats_.incumbent_updates;
      ++stats_.heuristic_successes;
    }
  }

  void consider(BnbNode node, SolveResult res, double parent_bound) {
    if (node.depth == 0 ||
        (settings_.heuristic_interval > 0 && stats_.nodes_evaluated % settings_.heuristic_interval == 0)) {
      try_heuristic(res);
    }
    switch (res.status) {
      case SolveStatus::kInfeasible:
        ++stats_.nodes_infeasible;
        return;
      case SolveStatus::kUnbounded:
        // Relaxation unbounded below: nothing to bound with, keep branching.
        node.bound = -kInf;
        break;
      case SolveStatus::kIterLimit:
        // The relaxation did not converge; its objective is not a valid bound.
        node.bound = parent_bound;
        break;
      case SolveStatus::kOptimal:
        node.bound = res.objective;
        break;
    }

    std::vector<int> candidates;
    int group = -1;
    int var = pick_branch_variable(node, res.x);
    if (var >= 0 && res.status == SolveStatus::kOptimal && settings_.heuristic) {
      // Completing the binaries often leaves the relaxation point feasible;
      // then a fixed solve closes the node. Otherwise branch where it breaks.
      const auto fixings = settings_.heuristic(res.x);
      const auto violated = violated_binaries(res.x, fixings);
      if (violated.empty()) {
        try_fixings(res, fixings);
        if (has_incumbent_ && node.bound >= incumbent_.objective - gap_allowance()) {
          ++stats_.nodes_pruned;
          return;
        }
      }
      if (settings_.branching == BranchingRule::kViolated) {
        double worst = 0.0;
        for (const auto& [v, amount] : violated) {
          candidates.push_back(v);
          const int g = group_of_[static_cast<std::size_t>(v)];
          if (g >= 0 && amount > worst && group_open(node, g)) {
            worst = amount;
            group = g;
          }
        }
        var = pick_branch_variable(node, res.x, candidates);
      }
    }
    if (var < 0) {
      if (res.status != SolveStatus::kOptimal) {
        ++stats_.nodes_unresolved;
        return;
      }
      if (!has_incumbent_ || res.objective < incumbent_.objective) {
        incumbent_ = std::move(res);
        has_incumbent_ = true;
        ++stats_.incumbent_updates;
      }
      return;
    }
    if (has_incumbent_ && node.bound >= incumbent_.objective - gap_allowance()) {
      ++stats_.nodes_pruned;
      return;
    }
    open_.push_back(OpenNode{std::move(node), std::move(res), order_++, std::move(candidates), group});
  }

  BnbNode make_child(const OpenNode& parent, int var, int value) {
    BnbNode child;
    child.fixed = parent.node.fixed;
    child.fixed.emplace_back(var, value);
    child.depth = parent.node.depth + 1;
    child.parent = parent.node.id;
    child.id = next_id_++;
    return child;
  }

  // Rows of the form sum_{j in G} x_j <= |G| - 1 over binaries.
  void find_cover_groups(const ConicProgram& prog) {
    group_of_.assign(static_cast<std::size_t>(prog.num_vars()), -1);
    for (const ConstraintBlock& blk : root_.blocks()) {
      if (blk.cone.kind != ConeKind::kNonnegative) continue;
      std::vector<std::vector<int>> rows(blk.b.size());
      std::vector<bool> ok(blk.b.size(), true);
      for (const Triplet& t : blk.a) {
        const auto r = static_cast<std::size_t>(t.row);
        if (t.value != 1.0 || !prog.binaries().contains(t.col)) ok[r] = false;
        rows[r].push_back(t.col);
      }
      for (std::size_t r = 0; r < rows.size(); ++r) {
        auto& members = rows[r];
        std::sort(members.begin(), members.end());
        if (std::adjacent_find(members.begin(), members.end()) != members.end()) continue;  // repeated column
        if (!ok[r] || members.size() < 2 || blk.b[r] != static_cast<double>(members.size() - 1)) continue;
        if (std::any_of(members.begin(), members.end(), [this](int v) { return group_of_[static_cast<std::size_t>(v)] >= 0; })) {
          continue;  // overlapping groups: keep the first
        }
        for (int v : members) group_of_[static_cast<std::size_t>(v)] = static_cast<int>(groups_.size());
        groups_.push_back(std::move(members));
      }
    }
  }

  // Value a binary is fixed to at `node`, or -1.
  static int fixed_value(const BnbNode& node, int var) {
    for (const auto& [v, value] : node.fixed) {
      if (v == var) return value;
    }
    return -1;
  }

  // A cover group can be branched on while none of its members is fixed to 0.
  bool group_open(const BnbNode& node, int g) const {
    const auto& members = groups_[static_cast<std::size_t>(g)];
    return std::none_of(members.begin(), members.end(), [&](int v) { return fixed_value(node, v) == 0; });
  }

  // At least one member of a cover group is 0. Child i makes the i-th free
  // member the first zero: earlier members are fixed to 1, so children
  // partition the integer points. Members are ordered by relaxation value.
  void branch_group(const OpenNode& current) {
    std::vector<int> order;
    for (int v : groups_[static_cast<std::size_t>(current.group)]) {
      if (fixed_value(current.node, v) < 0) order.push_back(v);
    }
    const auto& x = current.relaxation.x;
    std::stable_sort(order.begin(), order.end(),
                     [&x](int a, int b) { return x[static_cast<std::size_t>(a)] < x[static_cast<std::size_t>(b)]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
      BnbNode child = make_child(current, order[i], 0);
      for (std::size_t j = 0; j < i; ++j) child.fixed.emplace_back(order[j], 1);
      SolveResult res = evaluate(child, &current.relaxation, order[i], 0);
      consider(std::move(child), std::move(res), current.node.bound);
    }
  }

  void branch(const OpenNode& current) {
    ++stats_.nodes_branched;
    if (current.group >= 0) {
      branch_group(current);
      return;
    }
    const int var = pick_branch_variable(current.node, current.relaxation.x, current.candidates);
    const double val = current.relaxation.x[static_cast<std::size_t>(var)];
    // Nearer side first so an incumbent tends to appear early.
    const int first = val >= 0.5 ? 1 : 0;
    for (int value : {first, 1 - first}) {
      BnbNode child = make_child(current, var, value);
      SolveResult res = evaluate(child, &current.relaxation, var, value);
      consider(std::move(child), std::move(res), current.node.bound);
    }
  }

  ConicProgram root_;
  std::vector<std::size_t> binary_blocks_;
  std::vector<std::vector<int>> groups_;
  std::vector<int> group_of_;
  MipSettings settings_;
  std::vector<int> binaries_;
  std::vector<OpenNode> open_;
  int order_ = 0;
  int next_id_ = 1;
  bool has_incumbent_ = false;
  SolveResult incumbent_;
  MipStats stats_;
};

}  // namespace

MipResult solve_mip(const ConicProgram& prog, const MipSettings& settings) {
  prog.validate();
  if (settings.node_limit < 1) throw InvalidInput("solve_mip: node_limit must be >= 1");
  if (prog.binaries().empty()) {
    MipResult out;
    out.result = solve(prog, settings.relax);
    out.stats.nodes_evaluated = 1;
    out.stats.best_bound = out.result.objective;
    out.stats.seconds = out.result.solve_seconds;
    return out;
  }
  BranchAndBound bnb(prog, settings);
  return bnb.run();
}

}  // namespace hullmpc
