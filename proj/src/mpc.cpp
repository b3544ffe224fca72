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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hullmpc/error.hpp"
#include "hullmpc/orbitope.hpp"

namespace hullmpc {

std::string to_string(DynamicsOrder order) { return order == DynamicsOrder::kFirst ? "first" : "second"; }
std::string to_string(GoalMode mode) { return mode == GoalMode::kHard ? "hard" : "soft"; }

int rotation_dim(int n) {
  if (n == 2) return 2;
  if (n == 3) return 9;
  throw InvalidInput("dimension must be 2 or 3");
}

SmallMatrix rotation_matrix(int n, std::span<const double> p) {
  if (static_cast<int>(p.size()) != rotation_dim(n)) throw InvalidInput("rotation parameter count mismatch");
  if (n == 2) return SmallMatrix(2, 2, {p[0], -p[1], p[1], p[0]});
  return SmallMatrix::from_row_major(3, 3, p);
}

std::vector<double> rotation_params(const SmallMatrix& r) {
  if (r.rows() == 2 && r.cols() == 2) {
    if (std::abs(r(0, 0) - r(1, 1)) > 1e-9 || std::abs(r(0, 1) + r(1, 0)) > 1e-9) {
      throw InvalidInput("2x2 rotation state must have the form [a -b; b a]");
    }
    return {r(0, 0), r(1, 0)};
  }
  if (r.rows() == 3 && r.cols() == 3) {
    auto v = r.values();
    return {v.begin(), v.end()};
  }
  throw InvalidInput("rotation must be 2x2 or 3x3");
}

namespace {

bool psd(const SmallMatrix& m, double tol) {
  if (!m.is_symmetric(1e-12)) return false;
  return sym_eig(m).eigenvalues.front() >= -tol;
}

void check_vector(const std::vector<double>& v, int size, const char* what) {
  if (static_cast<int>(v.size()) != size) {
    throw InvalidInput(std::string(what) + ": expected " + std::to_string(size) + " entries, got " +
                       std::to_string(v.size()));
  }
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite entry");
}

void check_square(const SmallMatrix& m, int size, const char* what) {
  if (m.rows() != size || m.cols() != size) {
    throw InvalidInput(std::string(what) + ": expected a " + std::to_string(size) + "x" + std::to_string(size) +
                       " matrix");
  }
  if (!m.all_finite()) throw InvalidInput(std::string(what) + ": non-finite entry");
}

bool empty_matrix(const SmallMatrix& m) { return m.rows() == 0 || m.cols() == 0; }

// R V as a linear map of the rotation parameters: out[i] = sum_k coef[i][k] * p[k].
std::vector<std::vector<double>> rv_coefficients(int n, const std::vector<double>& v) {
  const int d = rotation_dim(n);
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(d)));
  if (n == 2) {
    c[0] = {v[0], -v[1]};
    c[1] = {v[1], v[0]};
  } else {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c[static_cast<std::size_t>(i)][static_cast<std::size_t>(3 * i + j)] = v[static_cast<std::size_t>(j)];
  }
  return c;
}

std::vector<double> apply_rv(int n, const std::vector<double>& v, std::span<const double> p) {
  const auto c = rv_coefficients(n, v);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t k = 0; k < p.size(); ++k)
      if (c[i][k] != 0.0) out[i] += c[i][k] * p[k];
  return out;
}

// Adds (x_idx - c)' W (x_idx - c) to the objective.
void add_weighted_square(ConicProgram& prog, const SmallMatrix& w, int first, std::span<const double> c) {
  const int d = w.rows();
  double constant = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      prog.add_quadratic(first + i, first + j, wij);
      const double ci = c.empty() ? 0.0 : c[static_cast<std::size_t>(i)];
      const double cj = c.empty() ? 0.0 : c[static_cast<std::size_t>(j)];
      if (cj != 0.0) prog.add_linear(first + i, -wij * cj);
      if (ci != 0.0) prog.add_linear(first + j, -wij * ci);
      constant += wij * ci * cj;
    }
  }
  prog.add_constant(constant);
}

// Block of equality rows built incrementally.
struct EqualityRows {
  ConstraintBlock blk;
  int row = 0;
  explicit EqualityRows(std::string label) { blk.label = std::move(label); }
  void term(int col, double v) {
    if (v != 0.0) blk.a.push_back({row, col, v});
  }
  void finish_row(double rhs) {
    blk.b.push_back(rhs);
    ++row;
  }
  void commit(ConicProgram& prog) {
    if (row == 0) return;
    blk.cone = Cone::zero(row);
    prog.add_block(std::move(blk));
  }
};

std::vector<double> or_zeros(const std::vector<double>& v, int size) {
  return v.empty() ? std::vector<double>(static_cast<std::size_t>(size), 0.0) : v;
}


MpcProblem build_impl(const MpcScenario& scen) {
  const int n = scen.n;
  const int d = rotation_dim(n);
  const int T = scen.horizon;
  const double h = scen.time_step;
  const bool second = scen.order == DynamicsOrder::kSecond;

  MpcProblem out;
  ConicProgram& prog = out.program;
  MpcLayout& lay = out.layout;
  lay.n = n;
  lay.rot_dim = d;
  lay.horizon = T;
  lay.order = scen.order;

  for (int t = 0; t <= T; ++t) {
    lay.rotation.push_back(prog.add_variables(d));
    lay.position.push_back(prog.add_variables(n));
    lay.rate.push_back(second ? prog.add_variables(d) : -1);
    lay.velocity.push_back(second ? prog.add_variables(n) : -1);
    if (t < T) lay.input.push_back(prog.add_variables(d));
  }

  // Initial state.
  const std::vector<double> r0 = rotation_params(scen.initial_rotation);
  const std::vector<double> w0 =
      empty_matrix(scen.initial_rotation_rate) ? std::vector<double>(static_cast<std::size_t>(d), 0.0)
                                               : rotation_params(scen.initial_rotation_rate);
  const std::vector<double> p0 = or_zeros(scen.initial_velocity, n);
  EqualityRows init("initial");
  for (int k = 0; k < d; ++k) {
    init.term(lay.rotation[0] + k, 1.0);
    init.finish_row(r0[static_cast<std::size_t>(k)]);
  }
  for (int i = 0; i < n; ++i) {
    init.term(lay.position[0] + i, 1.0);
    init.finish_row(scen.initial_position[static_cast<std::size_t>(i)]);
  }
  if (second) {
    for (int k = 0; k < d; ++k) {
      init.term(lay.rate[0] + k, 1.0);
      init.finish_row(w0[static_cast<std::size_t>(k)]);
    }
    for (int i = 0; i < n; ++i) {
      init.term(lay.velocity[0] + i, 1.0);
      init.finish_row(p0[static_cast<std::size_t>(i)]);
    }
  }
  init.commit(prog);

  // Dynamics.
  const auto rv = rv_coefficients(n, scen.body_velocity);
  for (int t = 0; t < T; ++t) {
    EqualityRows dyn("dynamics");
    const auto ut = static_cast<std::size_t>(t);
    if (!second) {
      // R' = R + h u ; s' = s + h R V
      for (int k = 0; k < d; ++k) {
        dyn.term(lay.rotation[ut + 1] + k, 1.0);
        dyn.term(lay.rotation[ut] + k, -1.0);
        dyn.term(lay.input[ut] + k, -h);
        dyn.finish_row(0.0);
      }
      for (int i = 0; i < n; ++i) {
        dyn.term(lay.position[ut + 1] + i, 1.0);
        dyn.term(lay.position[ut] + i, -1.0);
        for (int k = 0; k < d; ++k) dyn.term(lay.rotation[ut] + k, -h * rv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
        dyn.finish_row(0.0);
      }
    } else {
      // W' = W + h u ; R' = R + h W ; p' = p + h R V ; s' = s + h p
      for (int k = 0; k < d; ++k) {
        dyn.term(lay.rate[ut + 1] + k, 1.0);
        dyn.term(lay.rate[ut] + k, -1.0);
        dyn.term(lay.input[ut] + k, -h);
        dyn.finish_row(0.0);
      }
      for (int k = 0; k < d; ++k) {
        dyn.term(lay.rotation[ut + 1] + k, 1.0);
        dyn.term(lay.rotation[ut] + k, -1.0);
        dyn.term(lay.rate[ut] + k, -h);
        dyn.finish_row(0.0);
      }
      for (int i = 0; i < n; ++i) {
        dyn.term(lay.velocity[ut + 1] + i, 1.0);
        dyn.term(lay.velocity[ut] + i, -1.0);
        for (int k = 0; k < d; ++k) dyn.term(lay.rotation[ut] + k, -h * rv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
        dyn.finish_row(0.0);
      }
      for (int i = 0; i < n; ++i) {
        dyn.term(lay.position[ut + 1] + i, 1.0);
        dyn.term(lay.position[ut] + i, -1.0);
        dyn.term(lay.velocity[ut] + i, -h);
        dyn.finish_row(0.0);
      }
    }
    dyn.commit(prog);
  }

  // Hull of the rotation states. States fixed by the initial conditions are
  // checked in validate(); pinning them to the hull boundary would leave the
  // relaxation without an interior point.
  for (int t = second ? 2 : 1; t <= T; ++t) {
    const int r = lay.rotation[static_cast<std::size_t>(t)];
    if (n == 2) {
      prog.add_block(so2_hull_rows(r, r + 1, prog.num_vars()));
    } else {
      std::array<int, 9> idx{};
      for (int k = 0; k < 9; ++k) idx[static_cast<std::size_t>(k)] = r + k;
      prog.add_block(so3_hull_rows(idx, prog.num_vars()));
    }
  }

  // Terminal equality.
  if (scen.goal_mode == GoalMode::kHard) {
    EqualityRows term("terminal");
    for (int i = 0; i < n; ++i) {
      term.term(lay.position.back() + i, 1.0);
      term.finish_row(scen.goal[static_cast<std::size_t>(i)]);
    }
    if (scen.zero_terminal_velocity) {
      for (int i = 0; i < n; ++i) {
        term.term(lay.velocity.back() + i, 1.0);
        term.finish_row(0.0);
      }
    }
    term.commit(prog);
  }

  // Cost.
  for (int k = 1; k < T; ++k) add_weighted_square(prog, scen.state_weight, lay.position[static_cast<std::size_t>(k)], scen.goal);
  for (int k = 0; k < T; ++k) add_weighted_square(prog, scen.input_weight, lay.input[static_cast<std::size_t>(k)], {});
  add_weighted_square(prog, scen.terminal_weight, lay.position.back(), scen.goal);

  if (scen.input_bounds) {
    for (int u : lay.input)
      for (int k = 0; k < d; ++k) prog.set_bounds(u + k, scen.input_bounds->first, scen.input_bounds->second);
  }

  for (int t = 1; t <= T; ++t) {
    const int pos = lay.position[static_cast<std::size_t>(t)];
    for (const RectObstacle& obs : scen.obstacles) {
      lay.obstacle_binaries.push_back(add_obstacle(prog, obs, pos, pos + 1, scen.obstacle_big_m));
    }
    if (scen.min_speed) {
      const int r = lay.rotation[static_cast<std::size_t>(t)];
      lay.speed_binaries.push_back(add_min_speed(prog, *scen.min_speed, r, r + 1, scen.min_speed_big_m));
    }
  }
  return out;
}

}  // namespace

void validate(const MpcScenario& s, bool rotation_in_hull_only) {
  if (s.n != 2 && s.n != 3) throw InvalidInput("model.dimension must be 2 or 3");
  const int n = s.n;
  const int d = rotation_dim(n);
  if (s.horizon < 2) throw InvalidInput("model.horizon must be >= 2");
  if (!(s.time_step > 0.0) || !std::isfinite(s.time_step)) throw InvalidInput("model.time_step must be positive");
  check_vector(s.body_velocity, n, "model.body_velocity");
  check_vector(s.initial_position, n, "initial.position");
  check_vector(s.goal, n, "goal.position");
  if (!s.initial_velocity.empty()) check_vector(s.initial_velocity, n, "initial.velocity");
  check_square(s.initial_rotation, n, "initial.rotation");
  if (!empty_matrix(s.initial_rotation_rate)) {
    check_square(s.initial_rotation_rate, n, "initial.rotation_rate");
    rotation_params(s.initial_rotation_rate);
  }
  if (s.order == DynamicsOrder::kFirst && (!s.initial_velocity.empty() || !empty_matrix(s.initial_rotation_rate))) {
    throw InvalidInput("initial velocity and rotation rate need second-order dynamics");
  }
  if (s.zero_terminal_velocity && (s.order != DynamicsOrder::kSecond || s.goal_mode != GoalMode::kHard)) {
    throw InvalidInput("goal.zero_velocity needs second-order dynamics and a hard goal");
  }

  const SmallMatrix& r0 = s.initial_rotation;
  const std::vector<double> p = rotation_params(r0);
  if (rotation_in_hull_only) {
    const double viol = n == 2 ? so2_hull_violation(p[0], p[1]) : -so3_hull_min_eigenvalue(r0);
    if (viol > 1e-6) throw InvalidInput("initial.rotation is outside conv(SO(n))");
  } else {
    const SmallMatrix e = r0.transposed() * r0 - SmallMatrix::identity(n);
    if (e.frobenius_norm() > 1e-9 || std::abs(determinant(r0) - 1.0) > 1e-9) {
      throw InvalidInput("initial.rotation must be a proper rotation (R'R = I, det R = 1)");
    }
  }

  if (s.order == DynamicsOrder::kSecond && !empty_matrix(s.initial_rotation_rate)) {
    // R(1) = R(0) + h W(0) is fixed by the initial state as well.
    const SmallMatrix r1 = r0 + s.time_step * s.initial_rotation_rate;
    const std::vector<double> q = rotation_params(r1);
    const double viol = n == 2 ? so2_hull_violation(q[0], q[1]) : -so3_hull_min_eigenvalue(r1);
    if (viol > 1e-6) throw InvalidInput("initial.rotation_rate moves the rotation outside conv(SO(n)) in one step");
  }

  check_square(s.state_weight, n, "weights.state");
  check_square(s.terminal_weight, n, "weights.terminal");
  check_square(s.input_weight, d, "weights.input");
  if (!psd(s.state_weight, 1e-12)) throw InvalidInput("weights.state must be symmetric positive semidefinite");
  if (!psd(s.terminal_weight, 1e-12)) throw InvalidInput("weights.terminal must be symmetric positive semidefinite");
  if (!s.input_weight.is_symmetric(1e-12) || sym_eig(s.input_weight).eigenvalues.front() <= 0.0) {
    throw InvalidInput("weights.input must be symmetric positive definite");
  }
  for (const RectObstacle& o : s.obstacles) validate(o);
  if (!s.obstacles.empty() && !(s.obstacle_big_m > 0.0)) throw InvalidInput("big_m must be positive");
  if (s.min_speed) {
    if (n != 2) throw InvalidInput("min_speed applies to planar rotations only");
    validate(*s.min_speed);
    if (!(s.min_speed_big_m > 0.0)) throw InvalidInput("min_speed.big_m must be positive");
  }
  if (s.input_bounds && !(s.input_bounds->first <= s.input_bounds->second)) {
    throw InvalidInput("input_bounds: lower must not exceed upper");
  }
}

MpcProblem build_first_order(const MpcScenario& scen) {
  if (scen.order != DynamicsOrder::kFirst) throw InvalidInput("build_first_order: scenario is second order");
  validate(scen);
  return build_impl(scen);
}

MpcProblem build_second_order(const MpcScenario& scen) {
  if (scen.order != DynamicsOrder::kSecond) throw InvalidInput("build_second_order: scenario is first order");
  validate(scen);
  return build_impl(scen);
}

MpcProblem build_mpc(const MpcScenario& scen) {
  return scen.order == DynamicsOrder::kFirst ? build_first_order(scen) : build_second_order(scen);
}

double Trajectory::min_det() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : steps) m = std::min(m, s.det);
  return m;
}

double Trajectory::max_det() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : steps) m = std::max(m, s.det);
  return m;
}

double Trajectory::path_length() const {
  double len = 0.0;
  for (std::size_t t = 1; t < steps.size(); ++t) {
    double sq = 0.0;
    for (std::size_t i = 0; i < steps[t].position.size(); ++i) {
      const double dlt = steps[t].position[i] - steps[t - 1].position[i];
      sq += dlt * dlt;
    }
    len += std::sqrt(sq);
  }
  return len;
}

namespace {

std::vector<double> slice(std::span<const double> x, int first, int count) {
  return {x.begin() + first, x.begin() + first + count};
}

TrajectoryStep make_step(const MpcScenario& scen, int t, const VehicleState& st, std::span<const double> input) {
  const int n = scen.n;
  TrajectoryStep step;
  step.t = t;
  step.time = t * scen.time_step;
  step.rotation = rotation_matrix(n, st.rotation);
  step.position = st.position;
  if (scen.order == DynamicsOrder::kSecond) {
    step.velocity = st.velocity;
    step.rate = rotation_matrix(n, st.rate);
  }
  step.input = input.empty() ? SmallMatrix::zeros(n, n) : rotation_matrix(n, input);
  step.det = determinant(step.rotation);
  return step;
}

Trajectory empty_trajectory(const MpcScenario& scen) {
  Trajectory traj;
  traj.n = scen.n;
  traj.order = scen.order;
  traj.time_step = scen.time_step;
  traj.body_velocity = scen.body_velocity;
  return traj;
}

}  // namespace

Trajectory extract_trajectory(const MpcScenario& scen, const MpcLayout& lay, std::span<const double> x) {
  Trajectory traj = empty_trajectory(scen);
  for (int t = 0; t <= lay.horizon; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    VehicleState st;
    st.rotation = slice(x, lay.rotation[ut], lay.rot_dim);
    st.position = slice(x, lay.position[ut], lay.n);
    if (lay.order == DynamicsOrder::kSecond) {
      st.rate = slice(x, lay.rate[ut], lay.rot_dim);
      st.velocity = slice(x, lay.velocity[ut], lay.n);
    }
    std::vector<double> u;
    if (t < lay.horizon) u = slice(x, lay.input[ut], lay.rot_dim);
    traj.steps.push_back(make_step(scen, t, st, u));
  }
  return traj;
}

double dynamics_residual(const Trajectory& traj) {
  const double h = traj.time_step;
  const int n = traj.n;
  double worst = 0.0;
  auto upd = [&worst](double r) { worst = std::max(worst, std::abs(r)); };
  for (std::size_t t = 0; t + 1 < traj.steps.size(); ++t) {
    const TrajectoryStep& a = traj.steps[t];
    const TrajectoryStep& b = traj.steps[t + 1];
    std::vector<double> rv(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rv[static_cast<std::size_t>(i)] += a.rotation(i, j) * traj.body_velocity[static_cast<std::size_t>(j)];
    if (traj.order == DynamicsOrder::kFirst) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) upd(b.rotation(i, j) - a.rotation(i, j) - h * a.input(i, j));
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        upd(b.position[ui] - a.position[ui] - h * rv[ui]);
      }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          upd(b.rate(i, j) - a.rate(i, j) - h * a.input(i, j));
          upd(b.rotation(i, j) - a.rotation(i, j) - h * a.rate(i, j));
        }
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        upd(b.velocity[ui] - a.velocity[ui] - h * rv[ui]);
        upd(b.position[ui] - a.position[ui] - h * a.velocity[ui]);
      }
    }
  }
  return worst;
}

double hull_violation(const Trajectory& traj) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.steps) {
    if (traj.n == 2) {
      worst = std::max(worst, std::hypot(s.rotation(0, 0), s.rotation(1, 0)) - 1.0);
    } else {
      worst = std::max(worst, -so3_hull_min_eigenvalue(s.rotation));
    }
  }
  return worst;
}

std::vector<std::pair<int, int>> complete_binaries(const MpcScenario& scen, const MpcLayout& lay,
                                                   std::span<const double> x) {
  std::vector<std::pair<int, int>> out;
  auto keep_one = [&out](const auto& bins, const std::vector<double>& score) {
    const auto best = static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
    for (std::size_t k = 0; k < bins.size(); ++k) out.emplace_back(bins[k], k == best ? 0 : 1);
  };
  std::size_t obstacle_group = 0;
  for (int t = 1; t <= lay.horizon; ++t) {
    const int pos = lay.position[static_cast<std::size_t>(t)];
    const double px = x[static_cast<std::size_t>(pos)], py = x[static_cast<std::size_t>(pos + 1)];
    for (const RectObstacle& o : scen.obstacles) {
      keep_one(lay.obstacle_binaries[obstacle_group++], {o.x_min - px, px - o.x_max, o.y_min - py, py - o.y_max});
    }
  }
  for (std::size_t g = 0; g < lay.speed_binaries.size(); ++g) {
    const int r = lay.rotation[g + 1];
    const double a = x[static_cast<std::size_t>(r)], b = x[static_cast<std::size_t>(r + 1)];
    const int faces = static_cast<int>(lay.speed_binaries[g].size());
    std::vector<double> score;
    for (int k = 0; k < faces; ++k) {
      const double th = 2.0 * std::numbers::pi * k / faces;
      score.push_back(std::cos(th) * a + std::sin(th) * b);
    }
    keep_one(lay.speed_binaries[g], score);
  }
  return out;
}

namespace {
MipSettings with_heuristic(const MipSettings& settings, const MpcScenario& scen, const MpcLayout& lay) {
  MipSettings ms = settings;
  if (!ms.heuristic) {
    ms.heuristic = [&scen, &lay](std::span<const double> x) { return complete_binaries(scen, lay, x); };
  }
  return ms;
}
}  // namespace

Trajectory plan(const MpcScenario& scen, const MipSettings& settings) {
  const auto t0 = std::chrono::steady_clock::now();
  const MpcProblem prob = build_mpc(scen);
  const MipResult res = solve_mip(prob.program, with_heuristic(settings, scen, prob.layout));
  Trajectory traj = empty_trajectory(scen);
  if (!res.result.x.empty()) traj = extract_trajectory(scen, prob.layout, res.result.x);
  traj.status = res.result.status;
  traj.objective = res.result.objective;
  traj.iterations = res.result.iterations;
  traj.mip = res.stats;
  traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return traj;
}

VehicleState initial_state(const MpcScenario& scen) {
  VehicleState st;
  st.rotation = rotation_params(scen.initial_rotation);
  st.position = scen.initial_position;
  if (scen.order == DynamicsOrder::kSecond) {
    const int d = rotation_dim(scen.n);
    st.velocity = or_zeros(scen.initial_velocity, scen.n);
    st.rate = empty_matrix(scen.initial_rotation_rate) ? std::vector<double>(static_cast<std::size_t>(d), 0.0)
                                                       : rotation_params(scen.initial_rotation_rate);
  }
  return st;
}

VehicleState simulate(const MpcScenario& scen, const VehicleState& st, std::span<const double> u) {
  const double h = scen.time_step;
  const std::size_t d = st.rotation.size();
  if (u.size() != d) throw InvalidInput("simulate: input size mismatch");
  VehicleState next = st;
  const std::vector<double> rv = apply_rv(scen.n, scen.body_velocity, st.rotation);
  if (scen.order == DynamicsOrder::kFirst) {
    for (std::size_t k = 0; k < d; ++k) next.rotation[k] = st.rotation[k] + h * u[k];
    for (std::size_t i = 0; i < st.position.size(); ++i) next.position[i] = st.position[i] + h * rv[i];
  } else {
    for (std::size_t k = 0; k < d; ++k) {
      next.rate[k] = st.rate[k] + h * u[k];
      next.rotation[k] = st.rotation[k] + h * st.rate[k];
    }
    for (std::size_t i = 0; i < st.position.size(); ++i) {
      next.velocity[i] = st.velocity[i] + h * rv[i];
      next.position[i] = st.position[i] + h * st.velocity[i];
    }
  }
  return next;
}

GoalProcess static_goal(std::vector<double> goal) {
  return [goal = std::move(goal)](double) { return goal; };
}

GoalProcess oscillating_goal(std::vector<double> center, std::vector<double> amplitude, double omega) {
  if (amplitude.size() != center.size()) throw InvalidInput("goal_process: amplitude and center sizes differ");
  return [center = std::move(center), amplitude = std::move(amplitude), omega](double time) {
    std::vector<double> g = center;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += amplitude[i] * (i % 2 == 0 ? std::sin(omega * time) : std::cos(omega * time));
    }
    return g;
  };
}

namespace {
double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq);
}
}  // namespace

RhcResult receding_horizon(const MpcScenario& scen, const GoalProcess& goal, const RhcSettings& settings) {
  validate(scen);
  if (settings.lookahead < 2) throw InvalidInput("rhc.lookahead must be >= 2");
  if (settings.max_steps < 0) throw InvalidInput("rhc.max_steps must be >= 0");
  if (!(settings.capture_radius >= 0.0)) throw InvalidInput("rhc.capture_radius must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();

  RhcResult out;
  out.executed = empty_trajectory(scen);
  VehicleState state = initial_state(scen);
  out.executed.steps.push_back(make_step(scen, 0, state, {}));
  std::optional<SolveResult> previous;
  double total_objective = 0.0;

  for (int step = 0;; ++step) {
    const double now = step * scen.time_step;
    std::vector<double> g = goal(now);
    if (static_cast<int>(g.size()) != scen.n) throw InvalidInput("goal process returned the wrong dimension");
    out.goals.push_back(g);
    if (distance(state.position, g) <= settings.capture_radius) {
      out.captured = true;
      break;
    }
    if (step >= settings.max_steps) break;

    MpcScenario local = scen;
    local.horizon = settings.lookahead;
    local.goal_mode = GoalMode::kSoft;
    local.zero_terminal_velocity = false;
    local.goal = g;
    local.initial_position = state.position;
    local.initial_rotation = rotation_matrix(scen.n, state.rotation);
    if (scen.order == DynamicsOrder::kSecond) {
      local.initial_velocity = state.velocity;
      local.initial_rotation_rate = rotation_matrix(scen.n, state.rate);
    }
    validate(local, /*rotation_in_hull_only=*/true);
    const MpcProblem prob = build_impl(local);

    MipSettings ms = with_heuristic(settings.solver, local, prob.layout);
    if (previous) ms.relax.warm = warm_start(*previous, prob.program);
    const MipResult res = solve_mip(prob.program, ms);
    if (res.result.status != SolveStatus::kOptimal) {
      out.status = res.result.status;
      std::ostringstream msg;
      msg << "step " << step << ": solve returned " << to_string(res.result.status) << " after "
          << res.result.iterations << " iterations";
      out.diagnostic = msg.str();
      break;
    }
    total_objective += res.result.objective;
    const std::vector<double> u = slice(res.result.x, prob.layout.input[0], prob.layout.rot_dim);
    out.executed.steps.back().input = rotation_matrix(scen.n, u);
    state = simulate(scen, state, u);
    TrajectoryStep next = make_step(scen, step + 1, state, {});
    next.solve_iterations = res.result.iterations;
    next.solve_seconds = res.stats.seconds;
    out.executed.steps.push_back(std::move(next));
    out.executed.iterations += res.result.iterations;
    out.steps = step + 1;
    previous = res.result;
  }
  out.executed.status = out.status;
  out.executed.objective = total_objective;
  out.executed.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RoundedTrajectory round_trajectory(const Trajectory& traj) {
  RoundedTrajectory out;
  out.trajectory = traj;
  for (TrajectoryStep& s : out.trajectory.steps) {
    const RotationProjection p = project_to_SOn(s.rotation);
    out.distances.push_back(p.distance);
    out.unique.push_back(p.unique);
    s.rotation = p.rotation;
    s.det = determinant(p.rotation);
  }
  out.dynamics_residual = dynamics_residual(out.trajectory);
  return out;
}

}  // namespace hullmpc
