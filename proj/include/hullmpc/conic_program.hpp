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

#include <iosfwd>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "hullmpc/cones.hpp"

namespace hullmpc {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Rows A x + s = b with s constrained to `cone`. Triplet rows are local to
/// the block (0 <= row < cone.dim).
struct ConstraintBlock {
  std::vector<Triplet> a;
  std::vector<double> b;
  Cone cone;
  std::string label;
};

/// minimize 1/2 x'Px + q'x + offset  subject to  A x + s = b, s in K,
/// lower <= x <= upper, x_i in {0, 1} for i in binaries.
///
/// P is stored as a list of triplets for the full symmetric matrix;
/// add_quadratic mirrors off-diagonal terms automatically. Duplicate
/// triplets are summed.
class ConicProgram {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  ConicProgram() = default;
  explicit ConicProgram(int num_vars);

  int num_vars() const { return n_; }
  /// Appends `count` free variables and returns the index of the first one.
  int add_variables(int count);

  /// Adds weight * x_i * x_j to the objective (i == j gives weight * x_i^2).
  void add_quadratic(int i, int j, double weight);
  void add_linear(int i, double weight);
  void add_constant(double c) { offset_ += c; }

  /// Appends a constraint block after validating indices and cone shape.
  void add_block(ConstraintBlock block);
  void set_bounds(int i, double lower, double upper);
  /// Marks x_i binary and boxes it to [0, 1].
  void mark_binary(int i);

  const std::vector<Triplet>& p() const { return p_; }
  const std::vector<double>& q() const { return q_; }
  double offset() const { return offset_; }
  const std::vector<ConstraintBlock>& blocks() const { return blocks_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::set<int>& binaries() const { return binaries_; }
  std::vector<double>& mutable_lower() { return lower_; }
  std::vector<double>& mutable_upper() { return upper_; }

  int num_rows() const;
  double objective(std::span<const double> x) const;

  /// Throws InvalidInput describing the first broken invariant.
  void validate() const;

  /// Copy with binaries dropped (their [0,1] boxes remain).
  ConicProgram relaxed() const;

  /// Debug dump: JSON with keys n, offset, q, P (triplets), lower, upper,
  /// binaries and blocks[{label, cone{kind,dim,side}, b, A (triplets)}].
  void write_json(std::ostream& os) const;
  static ConicProgram read_json(std::istream& is);

 private:
  void check_index(int i, const char* what) const;

  int n_ = 0;
  std::vector<Triplet> p_;
  std::vector<double> q_;
  double offset_ = 0.0;
  std::vector<ConstraintBlock> blocks_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::set<int> binaries_;
};

}  // namespace hullmpc
