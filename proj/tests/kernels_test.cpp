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

#include "hullmpc/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace hullmpc::kernels {
namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

struct Variant {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  double (*norm_inf)(const double*, std::size_t);
  double (*diff_norm_inf)(const double*, const double*, std::size_t);
  void (*axpby)(double, const double*, double, double*, std::size_t);
  void (*mul)(const double*, const double*, double*, std::size_t);
  void (*clamp_nonneg)(double*, std::size_t);
};

std::vector<Variant> simd_variants() {
  std::vector<Variant> out;
#if defined(__x86_64__) || defined(_M_X64)
  if (isa_supported(Isa::kAvx2)) {
    out.push_back({Isa::kAvx2, avx2::dot, avx2::norm_inf, avx2::diff_norm_inf, avx2::axpby, avx2::mul,
                   avx2::clamp_nonneg});
  }
#endif
#if defined(__aarch64__)
  out.push_back({Isa::kNeon, neon::dot, neon::norm_inf, neon::diff_norm_inf, neon::axpby, neon::mul,
                 neon::clamp_nonneg});
#endif
  return out;
}

// Lengths straddle every vector width and remainder path.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1001};

TEST(KernelEquivalenceTest, SimdMatchesScalarReference) {
  const auto variants = simd_variants();
  if (variants.empty()) GTEST_SKIP() << "no SIMD variant available on this CPU";
  std::mt19937_64 rng(99);
  for (const auto& v : variants) {
    SCOPED_TRACE(std::string(isa_name(v.isa)));
    for (std::size_t n : kLengths) {
      const auto x = random_vector(rng, n);
      const auto y = random_vector(rng, n);

      // Reductions reassociate, so compare against the summed magnitude.
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
      EXPECT_NEAR(v.dot(x.data(), y.data(), n), scalar::dot(x.data(), y.data(), n), 1e-14 * (1.0 + mag));

      // Elementwise kernels are exact.
      EXPECT_EQ(v.norm_inf(x.data(), n), scalar::norm_inf(x.data(), n));
      EXPECT_EQ(v.diff_norm_inf(x.data(), y.data(), n), scalar::diff_norm_inf(x.data(), y.data(), n));

      auto y1 = y, y2 = y;
      v.axpby(0.7, x.data(), -1.3, y1.data(), n);
      scalar::axpby(0.7, x.data(), -1.3, y2.data(), n);
      EXPECT_EQ(y1, y2);

      std::vector<double> z1(n), z2(n);
      v.mul(x.data(), y.data(), z1.data(), n);
      scalar::mul(x.data(), y.data(), z2.data(), n);
      EXPECT_EQ(z1, z2);

      auto c1 = x, c2 = x;
      v.clamp_nonneg(c1.data(), n);
      scalar::clamp_nonneg(c2.data(), n);
      EXPECT_EQ(c1, c2);
    }
  }
}

TEST(KernelDispatchTest, ForcingScalarRoutesPublicEntryPoints) {
  const Isa before = active_isa();
  force_isa(Isa::kScalar);
  EXPECT_EQ(active_isa(), Isa::kScalar);
  std::vector<double> x{1.0, -2.0, 3.0};
  std::vector<double> y{4.0, 5.0, -6.0};
  EXPECT_DOUBLE_EQ(dot(x, y), 4.0 - 10.0 - 18.0);
  EXPECT_DOUBLE_EQ(norm_inf(y), 6.0);
  EXPECT_DOUBLE_EQ(diff_norm_inf(x, y), 9.0);
  axpby(2.0, x, 1.0, y);
  EXPECT_EQ(y, (std::vector<double>{6.0, 1.0, 0.0}));
  clamp_nonneg(x);
  EXPECT_EQ(x, (std::vector<double>{1.0, 0.0, 3.0}));
  force_isa(before);
}

TEST(KernelDispatchTest, ScalarIsAlwaysSupported) {
  EXPECT_TRUE(isa_supported(Isa::kScalar));
  EXPECT_EQ(isa_name(Isa::kAvx2), "avx2");
}

TEST(KernelDispatchTest, MismatchedLengthsThrow) {
  std::vector<double> a(3), b(4);
  EXPECT_ANY_THROW(dot(a, b));
}

}  // namespace
}  // namespace hullmpc::kernels
