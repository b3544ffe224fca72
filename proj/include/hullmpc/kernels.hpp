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
#include <string_view>

// Vector kernels for the solver's inner loops. Each routine exists as a
// scalar reference and, where the target allows, an AVX2 (x86-64) or NEON
// (aarch64) variant. The public entry points dispatch through a table that
// is chosen once from the running CPU; tests call the per-ISA namespaces
// directly to check the variants against the scalar reference.

namespace hullmpc::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
Isa active_isa();
/// Overrides the dispatch choice; throws InvalidInput if the CPU lacks it.
void force_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
double norm_inf(std::span<const double> x);
double diff_norm_inf(std::span<const double> x, std::span<const double> y);
/// y <- a*x + b*y
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
/// z <- x .* y
void mul(std::span<const double> x, std::span<const double> y, std::span<double> z);
/// x <- max(x, 0)
void clamp_nonneg(std::span<double> x);

#define HULLMPC_KERNEL_DECLS                                                            \
  double dot(const double* x, const double* y, std::size_t n);                          \
  double norm_inf(const double* x, std::size_t n);                                      \
  double diff_norm_inf(const double* x, const double* y, std::size_t n);                \
  void axpby(double a, const double* x, double b, double* y, std::size_t n);            \
  void mul(const double* x, const double* y, double* z, std::size_t n);                 \
  void clamp_nonneg(double* x, std::size_t n);

namespace scalar {
HULLMPC_KERNEL_DECLS
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
HULLMPC_KERNEL_DECLS
}
#endif
#if defined(__aarch64__)
namespace neon {
HULLMPC_KERNEL_DECLS
}
#endif

#undef HULLMPC_KERNEL_DECLS

}  // namespace hullmpc::kernels
