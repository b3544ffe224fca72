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

#include "hullmpc/cones.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hullmpc/error.hpp"
#include "hullmpc/kernels.hpp"

namespace hullmpc {

std::string to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::kZero:
      return "zero";
    case ConeKind::kNonnegative:
      return "nonnegative";
    case ConeKind::kSecondOrder:
      return "second_order";
    case ConeKind::kPositiveSemidefinite:
      return "psd";
  }
  return "unknown";
}

Cone Cone::zero(int dim) { return {ConeKind::kZero, dim, 0}; }
Cone Cone::nonnegative(int dim) { return {ConeKind::kNonnegative, dim, 0}; }
Cone Cone::second_order(int dim) { return {ConeKind::kSecondOrder, dim, 0}; }
Cone Cone::psd(int side) { return {ConeKind::kPositiveSemidefinite, svec_size(side), side}; }

void validate(const Cone& cone) {
  if (cone.dim < 1) throw InvalidInput("cone dimension must be >= 1");
  switch (cone.kind) {
    case ConeKind::kSecondOrder:
      if (cone.dim < 2) throw InvalidInput("second-order cone needs dim >= 2");
      break;
    case ConeKind::kPositiveSemidefinite:
      if (cone.side < 1 || cone.side > 4) throw InvalidInput("PSD cone side must lie in [1, 4]");
      if (cone.dim != svec_size(cone.side)) throw InvalidInput("PSD cone dim must equal side*(side+1)/2");
      break;
    default:
      break;
  }
}

int svec_size(int side) { return side * (side + 1) / 2; }

int svec_index(int row, int col, int side) {
  // Column-major lower triangle: column c starts after c*side - c*(c-1)/2 entries.
  return col * side - col * (col - 1) / 2 + (row - col);
}

std::vector<double> svec(const SmallMatrix& m) {
  const int side = m.rows();
  std::vector<double> v(static_cast<std::size_t>(svec_size(side)));
  for (int c = 0; c < side; ++c)
    for (int r = c; r < side; ++r)
      v[static_cast<std::size_t>(svec_index(r, c, side))] =
          r == c ? m(r, c) : std::numbers::sqrt2 * 0.5 * (m(r, c) + m(c, r));
  return v;
}

SmallMatrix smat(std::span<const double> v, int side) {
  if (static_cast<int>(v.size()) != svec_size(side)) throw InvalidInput("smat: length mismatch");
  SmallMatrix m(side, side);
  for (int c = 0; c < side; ++c)
    for (int r = c; r < side; ++r) {
      const double x = v[static_cast<std::size_t>(svec_index(r, c, side))];
      if (r == c) {
        m(r, c) = x;
      } else {
        m(r, c) = x / std::numbers::sqrt2;
        m(c, r) = m(r, c);
      }
    }
  return m;
}

namespace {

void project_soc(std::span<double> z) {
  const double t = z[0];
  double nx2 = 0.0;
  for (std::size_t i = 1; i < z.size(); ++i) nx2 += z[i] * z[i];
  const double nx = std::sqrt(nx2);
  if (nx <= t) return;
  if (nx <= -t) {
    std::fill(z.begin(), z.end(), 0.0);
    return;
  }
  const double alpha = 0.5 * (t + nx);
  z[0] = alpha;
  const double f = alpha / nx;
  for (std::size_t i = 1; i < z.size(); ++i) z[i] *= f;
}

void project_psd(std::span<double> z, int side) {
  if (side == 1) {
    z[0] = std::max(z[0], 0.0);
    return;
  }
  EigenDecomposition e = sym_eig(smat(z, side));
  if (e.eigenvalues.front() >= 0.0) return;
  for (double& l : e.eigenvalues) l = std::max(l, 0.0);
  const std::vector<double> v = svec(reconstruct(e));
  std::copy(v.begin(), v.end(), z.begin());
}

}  // namespace

void project_cone_inplace(std::span<double> z, const Cone& cone) {
  if (static_cast<int>(z.size()) != cone.dim) throw InvalidInput("project_cone: length does not match cone dim");
  switch (cone.kind) {
    case ConeKind::kZero:
      std::fill(z.begin(), z.end(), 0.0);
      break;
    case ConeKind::kNonnegative:
      kernels::clamp_nonneg(z);
      break;
    case ConeKind::kSecondOrder:
      project_soc(z);
      break;
    case ConeKind::kPositiveSemidefinite:
      project_psd(z, cone.side);
      break;
  }
}

void project_dual_cone_inplace(std::span<double> z, const Cone& cone) {
  if (cone.kind == ConeKind::kZero) return;
  project_cone_inplace(z, cone);
}

std::vector<double> project_cone(std::span<const double> z, const Cone& cone) {
  validate(cone);
  for (double v : z)
    if (!std::isfinite(v)) throw InvalidInput("project_cone: non-finite entry");
  std::vector<double> out(z.begin(), z.end());
  project_cone_inplace(out, cone);
  return out;
}

}  // namespace hullmpc
