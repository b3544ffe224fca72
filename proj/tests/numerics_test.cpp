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

#include "hullmpc/numerics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hullmpc/error.hpp"

namespace hullmpc {
namespace {

SmallMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SmallMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
  return m;
}

SmallMatrix random_symmetric(std::mt19937_64& rng, int n) {
  SmallMatrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.transposed());
}

double orthogonality_error(const SmallMatrix& q) {
  return (q.transposed() * q - SmallMatrix::identity(q.cols())).frobenius_norm();
}

// Oracle: cofactor-expansion determinant, independent of the LU path.
double cofactor_det(const SmallMatrix& a) {
  const int n = a.rows();
  if (n == 1) return a(0, 0);
  double det = 0.0;
  for (int c = 0; c < n; ++c) {
    SmallMatrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int k = 0; k < n; ++k) {
        if (k == c) continue;
        minor(r - 1, cc++) = a(r, k);
      }
    }
    det += ((c % 2 == 0) ? 1.0 : -1.0) * a(0, c) * cofactor_det(minor);
  }
  return det;
}

// Oracle: roots of det(A - lambda I) by scanning a Gershgorin interval for
// sign changes and bisecting each bracket.
std::vector<double> charpoly_roots(const SmallMatrix& a) {
  const int n = a.rows();
  double lo = std::numeric_limits<double>::max(), hi = -lo;
  for (int r = 0; r < n; ++r) {
    double radius = 0.0;
    for (int c = 0; c < n; ++c)
      if (c != r) radius += std::abs(a(r, c));
    lo = std::min(lo, a(r, r) - radius);
    hi = std::max(hi, a(r, r) + radius);
  }
  auto f = [&](double lambda) { return cofactor_det(a - lambda * SmallMatrix::identity(n)); };
  std::vector<double> roots;
  const int steps = 20000;
  double prev_x = lo - 1e-9, prev_f = f(prev_x);
  for (int k = 1; k <= steps; ++k) {
    const double xk = lo + (hi - lo) * k / steps + 1e-9;
    const double fk = f(xk);
    if ((prev_f < 0) != (fk < 0)) {
      double l = prev_x, h = xk, fl = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (l + h);
        const double fm = f(mid);
        if ((fm < 0) == (fl < 0)) {
          l = mid;
          fl = fm;
        } else {
          h = mid;
        }
      }
      roots.push_back(0.5 * (l + h));
    }
    prev_x = xk;
    prev_f = fk;
  }
  return roots;
}

TEST(SmallMatrixTest, RejectsOversizedDimensions) {
  EXPECT_THROW(SmallMatrix(10, 2), InvalidInput);
  EXPECT_THROW(SmallMatrix(2, 2, {1.0, 2.0, 3.0}), InvalidInput);
}

TEST(SmallMatrixTest, DeterminantMatchesCofactorExpansion) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const SmallMatrix a = random_matrix(rng, n, n);
      EXPECT_NEAR(determinant(a), cofactor_det(a), 1e-12);
    }
  }
}

TEST(SymEigTest, IdentityHasUnitEigenvalues) {
  const auto e = sym_eig(SmallMatrix::identity(4));
  for (double l : e.eigenvalues) EXPECT_DOUBLE_EQ(l, 1.0);
  EXPECT_LE(orthogonality_error(e.eigenvectors), 1e-14);
}

TEST(SymEigTest, DiagonalIsSortedAscendingWithPermutedAxes) {
  const auto e = sym_eig(SmallMatrix(2, 2, {3.0, 0.0, 0.0, -1.0}));
  EXPECT_DOUBLE_EQ(e.eigenvalues[0], -1.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues[1], 3.0);
  EXPECT_DOUBLE_EQ(std::abs(e.eigenvectors(1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(e.eigenvectors(0, 1)), 1.0);
}

TEST(SymEigTest, MatchesCharacteristicPolynomialRoots) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const SmallMatrix a = random_symmetric(rng, 4);
    const auto roots = charpoly_roots(a);
    ASSERT_EQ(roots.size(), 4u) << "oracle missed a root (near-repeated eigenvalue)";
    const auto e = sym_eig(a);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(e.eigenvalues[static_cast<std::size_t>(k)], roots[static_cast<std::size_t>(k)], 1e-9);
  }
}

TEST(SymEigTest, ReconstructionTraceAndDeterminantInvariants) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 9; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      SmallMatrix a = random_symmetric(rng, n);
      a = 3.0 * a;
      const auto e = sym_eig(a);
      const double scale = std::max(1.0, a.frobenius_norm());
      EXPECT_LE((reconstruct(e) - a).frobenius_norm(), 1e-10 * scale);
      EXPECT_LE(orthogonality_error(e.eigenvectors), 1e-10);
      EXPECT_TRUE(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
      double sum = 0.0, prod = 1.0;
      for (double l : e.eigenvalues) {
        sum += l;
        prod *= l;
      }
      EXPECT_NEAR(sum, a.trace(), 1e-10);
      if (n <= 4) {
        EXPECT_NEAR(prod, determinant(a), 1e-9);
      }
    }
  }
}

TEST(SymEigTest, SymmetrizesSlightlyAsymmetricInput) {
  SmallMatrix a(2, 2, {2.0, 1.0 + 1e-13, 1.0, 2.0});
  const auto e = sym_eig(a);
  EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-12);
  EXPECT_NEAR(e.eigenvalues[1], 3.0, 1e-12);
}

TEST(SymEigTest, RejectsNonFiniteEntries) {
  SmallMatrix a = SmallMatrix::identity(3);
  a(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(sym_eig(a), InvalidInput);
  a(1, 2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(svd(a), InvalidInput);
}

TEST(SvdTest, IdentityHasUnitSingularValues) {
  const auto f = svd(SmallMatrix::identity(3));
  for (double s : f.singular_values) EXPECT_DOUBLE_EQ(s, 1.0);
}

TEST(SvdTest, ScaledIdentity) {
  const auto f = svd(0.5 * SmallMatrix::identity(2));
  EXPECT_DOUBLE_EQ(f.singular_values[0], 0.5);
  EXPECT_DOUBLE_EQ(f.singular_values[1], 0.5);
  EXPECT_LE(orthogonality_error(f.u * f.v.transposed()), 1e-14);
}

TEST(SvdTest, SingularValuesMatchEigenvaluesOfGram) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const SmallMatrix a = random_matrix(rng, 3, 3);
    const auto f = svd(a);
    auto e = sym_eig(a.transposed() * a);
    std::reverse(e.eigenvalues.begin(), e.eigenvalues.end());
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(f.singular_values[static_cast<std::size_t>(k)],
                  std::sqrt(std::max(0.0, e.eigenvalues[static_cast<std::size_t>(k)])), 1e-9);
    }
  }
}

TEST(SvdTest, ReconstructionAndOrthogonalityProperty) {
  std::mt19937_64 rng(23);
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      SmallMatrix a = random_matrix(rng, n, n);
      if (trial % 4 == 1 && n >= 2) {
        // rank-deficient: duplicate a column
        for (int r = 0; r < n; ++r) a(r, n - 1) = a(r, 0);
      }
      if (trial % 4 == 2) a = 1e3 * a;
      const auto f = svd(a);
      const SmallMatrix rebuilt = f.u * SmallMatrix::diagonal(f.singular_values) * f.v.transposed();
      EXPECT_LE((rebuilt - a).frobenius_norm(), 1e-10 * std::max(1.0, a.frobenius_norm()));
      EXPECT_LE(orthogonality_error(f.u), 1e-10);
      EXPECT_LE(orthogonality_error(f.v), 1e-10);
      EXPECT_TRUE(std::is_sorted(f.singular_values.rbegin(), f.singular_values.rend()));
      EXPECT_GE(f.singular_values.back(), 0.0);
    }
  }
}

TEST(SvdTest, ZeroMatrixYieldsOrthogonalFactors) {
  const auto f = svd(SmallMatrix::zeros(3, 3));
  for (double s : f.singular_values) EXPECT_EQ(s, 0.0);
  EXPECT_LE(orthogonality_error(f.u), 1e-12);
  EXPECT_LE(orthogonality_error(f.v), 1e-12);
}

}  // namespace
}  // namespace hullmpc
