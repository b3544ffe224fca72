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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hullmpc/error.hpp"

namespace hullmpc {

namespace {

void check_dims(int rows, int cols) {
  if (rows < 0 || cols < 0 || rows > SmallMatrix::kMaxDim || cols > SmallMatrix::kMaxDim) {
    throw InvalidInput("SmallMatrix dimensions must lie in [0, 9], got " + std::to_string(rows) +
                       "x" + std::to_string(cols));
  }
}

void require_finite(const SmallMatrix& a, const char* where) {
  if (!a.all_finite()) throw InvalidInput(std::string(where) + ": non-finite matrix entry");
}

}  // namespace

SmallMatrix::SmallMatrix(int rows, int cols) : rows_(rows), cols_(cols) { check_dims(rows, cols); }

SmallMatrix::SmallMatrix(int rows, int cols, std::initializer_list<double> values)
    : SmallMatrix(rows, cols) {
  if (static_cast<int>(values.size()) != rows * cols) {
    throw InvalidInput("SmallMatrix initializer has wrong number of values");
  }
  std::copy(values.begin(), values.end(), data_.begin());
}

SmallMatrix SmallMatrix::identity(int n) {
  SmallMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SmallMatrix SmallMatrix::diagonal(std::span<const double> d) {
  SmallMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

SmallMatrix SmallMatrix::from_row_major(int rows, int cols, std::span<const double> values) {
  SmallMatrix m(rows, cols);
  if (static_cast<int>(values.size()) != rows * cols) {
    throw InvalidInput("SmallMatrix::from_row_major: size mismatch");
  }
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

SmallMatrix SmallMatrix::transposed() const {
  SmallMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double SmallMatrix::trace() const {
  double s = 0.0;
  for (int i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

double SmallMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values()) s += v * v;
  return std::sqrt(s);
}

bool SmallMatrix::all_finite() const {
  return std::all_of(values().begin(), values().end(), [](double v) { return std::isfinite(v); });
}

bool SmallMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (int r = 0; r < rows_; ++r)
    for (int c = r + 1; c < cols_; ++c)
      if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
  return true;
}

SmallMatrix operator+(const SmallMatrix& a, const SmallMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("matrix sum: shape mismatch");
  SmallMatrix out(a.rows_, a.cols_);
  for (int i = 0; i < a.rows_ * a.cols_; ++i) out.data_[i] = a.data_[i] + b.data_[i];
  return out;
}

SmallMatrix operator-(const SmallMatrix& a, const SmallMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidInput("matrix difference: shape mismatch");
  SmallMatrix out(a.rows_, a.cols_);
  for (int i = 0; i < a.rows_ * a.cols_; ++i) out.data_[i] = a.data_[i] - b.data_[i];
  return out;
}

SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b) {
  if (a.cols_ != b.rows_) throw InvalidInput("matrix product: inner dimension mismatch");
  SmallMatrix out(a.rows_, b.cols_);
  for (int r = 0; r < a.rows_; ++r)
    for (int c = 0; c < b.cols_; ++c) {
      double s = 0.0;
      for (int k = 0; k < a.cols_; ++k) s += a(r, k) * b(k, c);
      out(r, c) = s;
    }
  return out;
}

SmallMatrix operator*(double s, const SmallMatrix& a) {
  SmallMatrix out = a;
  for (int i = 0; i < a.rows_ * a.cols_; ++i) out.data_[i] *= s;
  return out;
}

bool operator==(const SmallMatrix& a, const SmallMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
         std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

double determinant(const SmallMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("determinant: matrix is not square");
  const int n = a.rows();
  SmallMatrix lu = a;
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(lu(r, k)) > std::abs(lu(pivot, k))) pivot = r;
    if (lu(pivot, k) == 0.0) return 0.0;
    if (pivot != k) {
      for (int c = 0; c < n; ++c) std::swap(lu(k, c), lu(pivot, c));
      det = -det;
    }
    det *= lu(k, k);
    for (int r = k + 1; r < n; ++r) {
      const double f = lu(r, k) / lu(k, k);
      for (int c = k; c < n; ++c) lu(r, c) -= f * lu(k, c);
    }
  }
  return det;
}

std::vector<double> multiply(const SmallMatrix& a, std::span<const double> x) {
  if (static_cast<int>(x.size()) != a.cols()) throw InvalidInput("multiply: dimension mismatch");
  std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) y[static_cast<std::size_t>(r)] += a(r, c) * x[static_cast<std::size_t>(c)];
  return y;
}

EigenDecomposition sym_eig(const SmallMatrix& a, double tol) {
  if (a.rows() != a.cols()) throw InvalidInput("sym_eig: matrix is not square");
  require_finite(a, "sym_eig");
  const int n = a.rows();
  SmallMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = 0.5 * (a(r, c) + a(c, r));
  SmallMatrix q = SmallMatrix::identity(n);

  const double scale = std::max(m.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) off += m(r, c) * m(r, c);
    if (std::sqrt(off) <= tol * scale) break;

    for (int p = 0; p < n; ++p) {
      for (int r = p + 1; r < n; ++r) {
        const double apr = m(p, r);
        if (apr == 0.0) continue;
        const double theta = (m(r, r) - m(p, p)) / (2.0 * apr);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkr = m(k, r);
          m(k, p) = c * mkp - s * mkr;
          m(k, r) = s * mkp + c * mkr;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mrk = m(r, k);
          m(p, k) = c * mpk - s * mrk;
          m(r, k) = s * mpk + c * mrk;
        }
        for (int k = 0; k < n; ++k) {
          const double qkp = q(k, p);
          const double qkr = q(k, r);
          q(k, p) = c * qkp - s * qkr;
          q(k, r) = s * qkp + c * qkr;
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return m(i, i) < m(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.eigenvectors = SmallMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    out.eigenvalues[static_cast<std::size_t>(k)] = m(src, src);
    for (int r = 0; r < n; ++r) out.eigenvectors(r, k) = q(r, src);
  }
  return out;
}

SmallMatrix reconstruct(const EigenDecomposition& e) {
  const int n = e.eigenvectors.rows();
  SmallMatrix out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += e.eigenvectors(r, k) * e.eigenvalues[static_cast<std::size_t>(k)] * e.eigenvectors(c, k);
      out(r, c) = s;
    }
  return out;
}

SvdResult svd(const SmallMatrix& a) {
  require_finite(a, "svd");
  const int m = a.rows();
  const int n = a.cols();
  if (m < n) throw InvalidInput("svd: expected rows >= cols");

  SmallMatrix w = a;  // columns are rotated until mutually orthogonal
  SmallMatrix v = SmallMatrix::identity(n);
  constexpr double eps = 1e-15;

  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int k = 0; k < m; ++k) {
          alpha += w(k, i) * w(k, i);
          beta += w(k, j) * w(k, j);
          gamma += w(k, i) * w(k, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int k = 0; k < m; ++k) {
          const double wi = w(k, i);
          const double wj = w(k, j);
          w(k, i) = c * wi - s * wj;
          w(k, j) = s * wi + c * wj;
        }
        for (int k = 0; k < n; ++k) {
          const double vi = v(k, i);
          const double vj = v(k, j);
          v(k, i) = c * vi - s * vj;
          v(k, j) = s * vi + c * vj;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += w(k, j) * w(k, j);
    norms[static_cast<std::size_t>(j)] = std::sqrt(s);
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return norms[static_cast<std::size_t>(i)] > norms[static_cast<std::size_t>(j)]; });

  SvdResult out;
  out.u = SmallMatrix(m, n);
  out.v = SmallMatrix(n, n);
  out.singular_values.resize(static_cast<std::size_t>(n));
  const double sigma_max = norms[static_cast<std::size_t>(order[0])];
  std::vector<bool> filled(static_cast<std::size_t>(n), false);
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    const double sigma = norms[static_cast<std::size_t>(src)];
    out.singular_values[static_cast<std::size_t>(k)] = sigma;
    for (int r = 0; r < n; ++r) out.v(r, k) = v(r, src);
    // Columns that vanished (exactly or to rounding) get an orthonormal
    // completion below instead of a normalized noise vector.
    if (sigma > 1e-14 * std::max(sigma_max, 1e-300) && sigma > 0.0) {
      for (int r = 0; r < m; ++r) out.u(r, k) = w(r, src) / sigma;
      filled[static_cast<std::size_t>(k)] = true;
    }
  }

  // Gram-Schmidt completion against the canonical basis.
  int basis = 0;
  for (int k = 0; k < n; ++k) {
    if (filled[static_cast<std::size_t>(k)]) continue;
    for (; basis < m; ++basis) {
      std::vector<double> cand(static_cast<std::size_t>(m), 0.0);
      cand[static_cast<std::size_t>(basis)] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < n; ++j) {
          if (!filled[static_cast<std::size_t>(j)]) continue;
          double d = 0.0;
          for (int r = 0; r < m; ++r) d += out.u(r, j) * cand[static_cast<std::size_t>(r)];
          for (int r = 0; r < m; ++r) cand[static_cast<std::size_t>(r)] -= d * out.u(r, j);
        }
      }
      double nrm = 0.0;
      for (double c : cand) nrm += c * c;
      nrm = std::sqrt(nrm);
      if (nrm > 1e-6) {
        for (int r = 0; r < m; ++r) out.u(r, k) = cand[static_cast<std::size_t>(r)] / nrm;
        filled[static_cast<std::size_t>(k)] = true;
        ++basis;
        break;
      }
    }
  }
  return out;
}

}  // namespace hullmpc
