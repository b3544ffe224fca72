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
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hullmpc {

/// Dense row-major matrix with at most 9 rows and 9 columns, stored inline.
///
/// Holds rotation candidates, the 4x4 spectrahedral matrix of conv(SO(3)),
/// weight matrices and SVD factors. Dimensions are fixed at construction.
class SmallMatrix {
 public:
  static constexpr int kMaxDim = 9;

  SmallMatrix() = default;
  SmallMatrix(int rows, int cols);
  /// Row-major initializer; the number of values must equal rows * cols.
  SmallMatrix(int rows, int cols, std::initializer_list<double> values);

  static SmallMatrix identity(int n);
  static SmallMatrix zeros(int rows, int cols) { return SmallMatrix(rows, cols); }
  static SmallMatrix diagonal(std::span<const double> d);
  static SmallMatrix from_row_major(int rows, int cols, std::span<const double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r * cols_ + c)]; }

  std::span<const double> values() const {
    return {data_.data(), static_cast<std::size_t>(rows_ * cols_)};
  }

  SmallMatrix transposed() const;
  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;
  bool is_symmetric(double tol) const;

  friend SmallMatrix operator+(const SmallMatrix& a, const SmallMatrix& b);
  friend SmallMatrix operator-(const SmallMatrix& a, const SmallMatrix& b);
  friend SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b);
  friend SmallMatrix operator*(double s, const SmallMatrix& a);
  friend bool operator==(const SmallMatrix& a, const SmallMatrix& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::array<double, kMaxDim * kMaxDim> data_{};
};

/// Determinant by LU with partial pivoting. Square matrices only.
double determinant(const SmallMatrix& a);

/// Matrix-vector product.
std::vector<double> multiply(const SmallMatrix& a, std::span<const double> x);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  SmallMatrix eigenvectors;         // column k pairs with eigenvalues[k]
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized as (A + A^T) / 2 before iterating. Sweeps stop
/// once the off-diagonal mass falls below tol * ||A||_F or after 100 sweeps.
EigenDecomposition sym_eig(const SmallMatrix& a, double tol = 1e-15);

struct SvdResult {
  SmallMatrix u;
  std::vector<double> singular_values;  // nonnegative, descending
  SmallMatrix v;
};

/// Thin SVD of a square or tall matrix (rows >= cols, cols <= 4 in practice)
/// by one-sided Jacobi orthogonalization of the columns.
SvdResult svd(const SmallMatrix& a);

/// Rebuilds Q diag(lambda) Q^T.
SmallMatrix reconstruct(const EigenDecomposition& e);

}  // namespace hullmpc
