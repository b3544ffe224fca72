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

#include "hullmpc/orbitope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "hullmpc/error.hpp"

namespace hullmpc {

ConstraintBlock so2_hull_rows(int a_index, int b_index, int num_vars) {
  if (a_index < 0 || a_index >= num_vars || b_index < 0 || b_index >= num_vars) {
    throw InvalidInput("so2_hull_rows: variable index out of range");
  }
  if (a_index == b_index) throw InvalidInput("so2_hull_rows: indices must be distinct");
  // s = (1, a, b) in the second-order cone.
  ConstraintBlock blk;
  blk.cone = Cone::second_order(3);
  blk.b = {1.0, 0.0, 0.0};
  blk.a = {{1, a_index, -1.0}, {2, b_index, -1.0}};
  blk.label = "so2_hull";
  return blk;
}

namespace {

// Coefficients of the spectrahedral matrix M(X) = I + sum_ij x_ij * E_ij,
// listed per upper-triangle entry as (x row, x col, sign).
struct Term {
  int i, j;
  double sign;
};
struct Entry {
  int r, c;
  std::array<Term, 3> terms;
  int count;
};

// clang-format off
constexpr std::array<Entry, 10> kSo3Entries{{
    {0, 0, {{{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}}, 3},
    {1, 1, {{{0, 0, 1.0}, {1, 1, -1.0}, {2, 2, -1.0}}}, 3},
    {2, 2, {{{0, 0, -1.0}, {1, 1, 1.0}, {2, 2, -1.0}}}, 3},
    {3, 3, {{{0, 0, -1.0}, {1, 1, -1.0}, {2, 2, 1.0}}}, 3},
    {0, 1, {{{2, 1, 1.0}, {1, 2, -1.0}, {0, 0, 0.0}}}, 2},
    {0, 2, {{{0, 2, 1.0}, {2, 0, -1.0}, {0, 0, 0.0}}}, 2},
    {0, 3, {{{1, 0, 1.0}, {0, 1, -1.0}, {0, 0, 0.0}}}, 2},
    {1, 2, {{{1, 0, 1.0}, {0, 1, 1.0}, {0, 0, 0.0}}}, 2},
    {1, 3, {{{0, 2, 1.0}, {2, 0, 1.0}, {0, 0, 0.0}}}, 2},
    {2, 3, {{{2, 1, 1.0}, {1, 2, 1.0}, {0, 0, 0.0}}}, 2},
}};
// clang-format on

}  // namespace

ConstraintBlock so3_hull_rows(std::span<const int, 9> x_indices, int num_vars) {
  std::set<int> seen;
  for (int idx : x_indices) {
    if (idx < 0 || idx >= num_vars) throw InvalidInput("so3_hull_rows: variable index out of range");
    if (!seen.insert(idx).second) throw InvalidInput("so3_hull_rows: variable index reused");
  }
  ConstraintBlock blk;
  blk.cone = Cone::psd(4);
  blk.b.assign(10, 0.0);
  blk.label = "so3_hull";
  for (const Entry& e : kSo3Entries) {
    // svec row for the lower-triangle position (c, r) of this symmetric entry.
    const int row = svec_index(std::max(e.r, e.c), std::min(e.r, e.c), 4);
    const double scale = e.r == e.c ? 1.0 : std::numbers::sqrt2;
    if (e.r == e.c) blk.b[static_cast<std::size_t>(row)] = 1.0;
    for (int k = 0; k < e.count; ++k) {
      const Term& t = e.terms[static_cast<std::size_t>(k)];
      // A x + s = b  =>  s = b - A x, so A carries the negated coefficient.
      blk.a.push_back({row, x_indices[static_cast<std::size_t>(3 * t.i + t.j)], -scale * t.sign});
    }
  }
  return blk;
}

SmallMatrix so3_hull_matrix(const SmallMatrix& x) {
  if (x.rows() != 3 || x.cols() != 3) throw InvalidInput("so3_hull_matrix: expected a 3x3 matrix");
  SmallMatrix m = SmallMatrix::identity(4);
  for (const Entry& e : kSo3Entries) {
    double v = e.r == e.c ? 1.0 : 0.0;
    for (int k = 0; k < e.count; ++k) {
      const Term& t = e.terms[static_cast<std::size_t>(k)];
      v += t.sign * x(t.i, t.j);
    }
    m(e.r, e.c) = v;
    m(e.c, e.r) = v;
  }
  return m;
}

double so3_hull_min_eigenvalue(const SmallMatrix& x) { return sym_eig(so3_hull_matrix(x)).eigenvalues.front(); }

double so2_hull_violation(double a, double b) { return std::max(0.0, std::hypot(a, b) - 1.0); }

RotationProjection project_to_SOn(const SmallMatrix& s) {
  if (s.rows() != s.cols() || (s.rows() != 2 && s.rows() != 3)) {
    throw InvalidInput("project_to_SOn: expected a 2x2 or 3x3 matrix");
  }
  const int n = s.rows();
  const SvdResult f = svd(s);
  const SmallMatrix uvt = f.u * f.v.transposed();
  const double d = determinant(uvt) < 0.0 ? -1.0 : 1.0;

  SmallMatrix fix = SmallMatrix::identity(n);
  fix(n - 1, n - 1) = d;
  RotationProjection out;
  out.rotation = f.u * fix * f.v.transposed();
  out.distance = (s - out.rotation).frobenius_norm();
  const double s_last = f.singular_values[static_cast<std::size_t>(n - 1)];
  const double s_prev = f.singular_values[static_cast<std::size_t>(n - 2)];
  out.unique = s_prev + d * s_last > 1e-12 * std::max(1.0, f.singular_values.front());
  return out;
}

SmallMatrix rotation_from_quaternion(double w, double x, double y, double z) {
  const double nrm = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw InvalidInput("rotation_from_quaternion: zero or non-finite quaternion");
  w /= nrm;
  x /= nrm;
  y /= nrm;
  z /= nrm;
  return SmallMatrix(3, 3,
                     {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),  //
                      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),  //
                      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)});
}

}  // namespace hullmpc
