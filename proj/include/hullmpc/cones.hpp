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

#include <span>
#include <string>
#include <vector>

#include "hullmpc/numerics.hpp"

namespace hullmpc {

enum class ConeKind { kZero, kNonnegative, kSecondOrder, kPositiveSemidefinite };

std::string to_string(ConeKind kind);

/// A closed convex cone acting on a slack block of length `dim`.
///
/// PSD blocks hold the scaled lower triangle (svec) of a side x side matrix,
/// column by column, with off-diagonal entries multiplied by sqrt(2) so the
/// Euclidean inner product of two svec vectors equals the trace inner
/// product of the matrices.
struct Cone {
  ConeKind kind = ConeKind::kZero;
  int dim = 1;
  int side = 0;  // PSD only

  static Cone zero(int dim);
  static Cone nonnegative(int dim);
  static Cone second_order(int dim);
  static Cone psd(int side);

  /// Zero, nonnegative and second-order cones are self-dual apart from the
  /// zero cone, whose dual is the whole space.
  bool is_separable() const { return kind == ConeKind::kZero || kind == ConeKind::kNonnegative; }

  friend bool operator==(const Cone&, const Cone&) = default;
};

/// Throws InvalidInput if the cone's fields break its invariants.
void validate(const Cone& cone);

/// Euclidean projection of z onto the cone.
std::vector<double> project_cone(std::span<const double> z, const Cone& cone);
/// In-place variant used by the solver.
void project_cone_inplace(std::span<double> z, const Cone& cone);
/// Projection onto the dual cone (free space for the zero cone).
void project_dual_cone_inplace(std::span<double> z, const Cone& cone);

int svec_size(int side);
/// Position of entry (row, col), row >= col, inside an svec vector.
int svec_index(int row, int col, int side);
std::vector<double> svec(const SmallMatrix& symmetric);
SmallMatrix smat(std::span<const double> v, int side);

}  // namespace hullmpc
