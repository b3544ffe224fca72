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
#include <span>

#include "hullmpc/conic_program.hpp"
#include "hullmpc/numerics.hpp"

namespace hullmpc {

/// Relaxed planar rotation [a -b; b a] with a^2 + b^2 <= 1.
struct HullRotation2 {
  double a = 1.0;
  double b = 0.0;

  SmallMatrix matrix() const { return SmallMatrix(2, 2, {a, -b, b, a}); }
  double det() const { return a * a + b * b; }
};

/// Relaxed spatial rotation: any 3x3 matrix in conv(SO(3)).
struct HullRotation3 {
  SmallMatrix x = SmallMatrix::identity(3);
};

/// One second-order cone block of dim 3 encoding ||(a, b)|| <= 1.
ConstraintBlock so2_hull_rows(int a_index, int b_index, int num_vars);

/// One PSD block of side 4 whose affine map is the spectrahedral
/// description of conv(SO(3)). `x_indices` lists x_11, x_12, ..., x_33.
ConstraintBlock so3_hull_rows(std::span<const int, 9> x_indices, int num_vars);

/// The 4x4 symmetric matrix whose positive semidefiniteness characterizes
/// X in conv(SO(3)).
SmallMatrix so3_hull_matrix(const SmallMatrix& x);
double so3_hull_min_eigenvalue(const SmallMatrix& x);
/// max(0, ||(a,b)|| - 1)
double so2_hull_violation(double a, double b);

struct RotationProjection {
  SmallMatrix rotation;
  double distance = 0.0;  // ||S - rotation||_F
  bool unique = true;
};

/// Nearest proper rotation to S in Frobenius norm, U diag(1,..,1,d) V^T
/// with d = det(U V^T). `unique` is false when the minimizer is not unique
/// (sigma_{n-1} + d * sigma_n vanishes), in which case a valid rotation is
/// still returned.
RotationProjection project_to_SOn(const SmallMatrix& s);

/// Rotation from a unit quaternion (w, x, y, z); normalizes the input.
SmallMatrix rotation_from_quaternion(double w, double x, double y, double z);

}  // namespace hullmpc
