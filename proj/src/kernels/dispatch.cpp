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

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <string_view>

#include "hullmpc/error.hpp"
#include "hullmpc/kernels.hpp"

namespace hullmpc::kernels {

namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  double (*norm_inf)(const double*, std::size_t);
  double (*diff_norm_inf)(const double*, const double*, std::size_t);
  void (*axpby)(double, const double*, double, double*, std::size_t);
  void (*mul)(const double*, const double*, double*, std::size_t);
  void (*clamp_nonneg)(double*, std::size_t);
};

constexpr Table kScalar{Isa::kScalar,       scalar::dot, scalar::norm_inf, scalar::diff_norm_inf,
                        scalar::axpby,      scalar::mul, scalar::clamp_nonneg};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2{Isa::kAvx2,     avx2::dot, avx2::norm_inf, avx2::diff_norm_inf,
                      avx2::axpby,    avx2::mul, avx2::clamp_nonneg};
#endif
#if defined(__aarch64__)
constexpr Table kNeon{Isa::kNeon,     neon::dot, neon::norm_inf, neon::diff_norm_inf,
                      neon::axpby,    neon::mul, neon::clamp_nonneg};
#endif

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &kScalar;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return &kAvx2;
#else
      return nullptr;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

// HULLMPC_SIMD=scalar pins the reference kernels (useful when bisecting
// numerical differences between machines).
const Table* detect() {
  if (const char* env = std::getenv("HULLMPC_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
    return &kScalar;
  }
  if (isa_supported(Isa::kAvx2)) return table_for(Isa::kAvx2);
  if (isa_supported(Isa::kNeon)) return table_for(Isa::kNeon);
  return &kScalar;
}

std::atomic<const Table*>& active() {
  static std::atomic<const Table*> table{detect()};
  return table;
}

const Table& t() { return *active().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return t().isa; }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw InvalidInput("kernel ISA '" + std::string(isa_name(isa)) + "' is not supported on this CPU");
  }
  active().store(table_for(isa), std::memory_order_relaxed);
}

namespace {
void same_size(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidInput("kernel operands differ in length");
}
}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  same_size(x.size(), y.size());
  return t().dot(x.data(), y.data(), x.size());
}

double norm_inf(std::span<const double> x) { return t().norm_inf(x.data(), x.size()); }

double diff_norm_inf(std::span<const double> x, std::span<const double> y) {
  same_size(x.size(), y.size());
  return t().diff_norm_inf(x.data(), y.data(), x.size());
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  same_size(x.size(), y.size());
  t().axpby(a, x.data(), b, y.data(), x.size());
}

void mul(std::span<const double> x, std::span<const double> y, std::span<double> z) {
  same_size(x.size(), y.size());
  same_size(x.size(), z.size());
  t().mul(x.data(), y.data(), z.data(), x.size());
}

void clamp_nonneg(std::span<double> x) { t().clamp_nonneg(x.data(), x.size()); }

}  // namespace hullmpc::kernels
