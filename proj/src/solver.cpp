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

#include "hullmpc/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <span>

#include "hullmpc/error.hpp"
#include "hullmpc/kernels.hpp"

namespace hullmpc {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "Optimal";
    case SolveStatus::kInfeasible:
      return "Infeasible";
    case SolveStatus::kUnbounded:
      return "Unbounded";
    case SolveStatus::kIterLimit:
      return "IterLimit";
  }
  return "Unknown";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

std::span<double> view(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

struct RowBlock {
  int offset;
  Cone cone;
};

// Program in solver form: constraint blocks followed by one nonnegative
// block holding the finite variable bounds.
struct Assembled {
  int n = 0;
  int m = 0;
  SpMat p;
  Vec q;
  SpMat a;
  Vec b;
  std::vector<RowBlock> blocks;
};

Assembled assemble(const ConicProgram& prog) {
  Assembled out;
  out.n = prog.num_vars();
  std::vector<Eigen::Triplet<double>> at;
  std::vector<double> b;
  int row = 0;
  for (const auto& blk : prog.blocks()) {
    for (const Triplet& t : blk.a) at.emplace_back(row + t.row, t.col, t.value);
    b.insert(b.end(), blk.b.begin(), blk.b.end());
    out.blocks.push_back({row, blk.cone});
    row += blk.cone.dim;
  }
  const int bound_start = row;
  for (int i = 0; i < out.n; ++i) {
    const double u = prog.upper()[static_cast<std::size_t>(i)];
    const double l = prog.lower()[static_cast<std::size_t>(i)];
    if (std::isfinite(u)) {
      at.emplace_back(row++, i, 1.0);
      b.push_back(u);
    }
    if (std::isfinite(l)) {
      at.emplace_back(row++, i, -1.0);
      b.push_back(-l);
    }
  }
  if (row > bound_start) out.blocks.push_back({bound_start, Cone::nonnegative(row - bound_start)});
  out.m = row;
  out.a.resize(out.m, out.n);
  out.a.setFromTriplets(at.begin(), at.end());
  out.b = Eigen::Map<const Vec>(b.data(), static_cast<Eigen::Index>(b.size()));

  std::vector<Eigen::Triplet<double>> pt;
  for (const Triplet& t : prog.p()) pt.emplace_back(t.row, t.col, t.value);
  out.p.resize(out.n, out.n);
  out.p.setFromTriplets(pt.begin(), pt.end());
  out.q = Eigen::Map<const Vec>(prog.q().data(), out.n);
  return out;
}

double clamp_scaling(double norm) {
  if (norm < 1e-4) return 1.0;
  return std::min(norm, 1e4);
}

// Modified Ruiz equilibration of [P A'; A 0]. Rows of second-order and PSD
// blocks share one factor so the cones stay invariant under the scaling.
struct Scaling {
  Vec d;
  Vec e;
  double c = 1.0;
};

Scaling equilibrate(Assembled& pr, int iters) {
  Scaling sc{Vec::Ones(pr.n), Vec::Ones(pr.m), 1.0};
  for (int it = 0; it < iters; ++it) {
    Vec col(pr.n);
    col.setZero();
    Vec rown(pr.m);
    rown.setZero();
    for (int j = 0; j < pr.p.outerSize(); ++j)
      for (SpMat::InnerIterator k(pr.p, j); k; ++k) col[j] = std::max(col[j], std::abs(k.value()));
    for (int j = 0; j < pr.a.outerSize(); ++j)
      for (SpMat::InnerIterator k(pr.a, j); k; ++k) {
        col[j] = std::max(col[j], std::abs(k.value()));
        rown[k.row()] = std::max(rown[k.row()], std::abs(k.value()));
      }
    Vec dn(pr.n), dm(pr.m);
    for (int j = 0; j < pr.n; ++j) dn[j] = 1.0 / std::sqrt(clamp_scaling(col[j]));
    for (int i = 0; i < pr.m; ++i) dm[i] = 1.0 / std::sqrt(clamp_scaling(rown[i]));
    for (const auto& blk : pr.blocks) {
      if (blk.cone.is_separable()) continue;
      const double mean = dm.segment(blk.offset, blk.cone.dim).mean();
      dm.segment(blk.offset, blk.cone.dim).setConstant(mean);
    }
    pr.p = dn.asDiagonal() * pr.p * dn.asDiagonal();
    pr.a = dm.asDiagonal() * pr.a * dn.asDiagonal();
    pr.q = pr.q.cwiseProduct(dn);
    pr.b = pr.b.cwiseProduct(dm);
    sc.d = sc.d.cwiseProduct(dn);
    sc.e = sc.e.cwiseProduct(dm);

    double pmean = 0.0;
    if (pr.n > 0) {
      Vec pcol(pr.n);
      pcol.setZero();
      for (int j = 0; j < pr.p.outerSize(); ++j)
        for (SpMat::InnerIterator k(pr.p, j); k; ++k) pcol[j] = std::max(pcol[j], std::abs(k.value()));
      pmean = pcol.mean();
    }
    const double qn = pr.q.size() > 0 ? pr.q.lpNorm<Eigen::Infinity>() : 0.0;
    const double gamma = 1.0 / clamp_scaling(std::max(pmean, qn));
    pr.p *= gamma;
    pr.q *= gamma;
    sc.c *= gamma;
  }
  pr.p.makeCompressed();
  pr.a.makeCompressed();
  return sc;
}

class Admm {
 public:
  Admm(const ConicProgram& prog, const SolverSettings& settings)
      : prog_(prog), settings_(settings), pr_(assemble(prog)) {
    sc_ = equilibrate(pr_, settings_.scaling_iters);
    at_ = pr_.a.transpose();
    dinv_ = sc_.d.cwiseInverse();
    einv_ = sc_.e.cwiseInverse();
    zero_row_.assign(static_cast<std::size_t>(pr_.m), false);
    for (const auto& blk : pr_.blocks)
      if (blk.cone.kind == ConeKind::kZero)
        for (int i = 0; i < blk.cone.dim; ++i) zero_row_[static_cast<std::size_t>(blk.offset + i)] = true;
  }

  SolveResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    const int n = pr_.n;
    const int m = pr_.m;
    x_ = Vec::Zero(n);
    s_ = Vec::Zero(m);
    y_ = Vec::Zero(m);
    rho_ = settings_.rho;

    if (settings_.warm) apply_warm_start(*settings_.warm, res);
    set_rho_vectors();
    factor(true);

    Vec rhs(n + m), sol(n + m), s_tilde(m), s_relax(m), v(m), work(m);
    Vec x_prev = x_, y_prev = y_;

    int iter = 0;
    for (iter = 1; iter <= settings_.max_iters; ++iter) {
      x_prev = x_;
      y_prev = y_;

      rhs.head(n) = settings_.sigma * x_ - pr_.q;
      kernels::mul(view(y_), view(rho_inv_), view(work));
      rhs.tail(m) = pr_.b - s_ + work;
      solve_kkt(rhs, sol);

      // s~ = s - (nu + y) / rho
      s_tilde = sol.tail(m) + y_;
      kernels::mul(view(s_tilde), view(rho_inv_), view(work));
      s_tilde = s_ - work;

      Vec xt = sol.head(n);
      kernels::axpby(settings_.alpha, view(xt), 1.0 - settings_.alpha, view(x_));
      s_relax = s_;
      kernels::axpby(settings_.alpha, view(s_tilde), 1.0 - settings_.alpha, view(s_relax));

      kernels::mul(view(y_), view(rho_inv_), view(work));
      v = s_relax + work;
      project(v);
      // y += rho .* (s_relax - s_new)
      work = s_relax - v;
      kernels::mul(view(work), view(rho_vec_), view(work));
      y_ += work;
      s_ = v;

      const bool last = iter == settings_.max_iters;
      if (iter % settings_.check_interval != 0 && !last) continue;

      compute_residuals();
      if (converged()) {
        res.status = SolveStatus::kOptimal;
        break;
      }
      if (primal_infeasible(y_ - y_prev)) {
        res.status = SolveStatus::kInfeasible;
        break;
      }
      if (dual_infeasible(x_ - x_prev)) {
        res.status = SolveStatus::kUnbounded;
        break;
      }
      if (settings_.adaptive_rho && iter % settings_.adapt_interval == 0) adapt_rho();
    }

    res.iterations = std::min(iter, settings_.max_iters);
    if (iter > settings_.max_iters) res.status = SolveStatus::kIterLimit;
    fill_result(res);
    res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

 private:
  void apply_warm_start(const WarmStart& w, SolveResult& res) {
    const int n = pr_.n;
    const int m = pr_.m;
    const bool x_ok = static_cast<int>(w.x.size()) == n;
    if (!x_ok) {
      res.warm_start_rejected = true;
      return;
    }
    for (double v : w.x)
      if (!std::isfinite(v)) {
        res.warm_start_rejected = true;
        return;
      }
    res.warm_started = true;
    Vec x = Eigen::Map<const Vec>(w.x.data(), n);
    x_ = x.cwiseProduct(dinv_);
    if (static_cast<int>(w.s.size()) == m && static_cast<int>(w.y.size()) == m) {
      Vec s = Eigen::Map<const Vec>(w.s.data(), m);
      Vec y = Eigen::Map<const Vec>(w.y.data(), m);
      s_ = s.cwiseProduct(sc_.e);
      // Internal y lives in the polar cone and is scaled by c / E.
      y_ = -sc_.c * y.cwiseProduct(einv_);
      if (w.rho > 0.0) rho_ = w.rho;
    } else {
      // Rows changed: keep x, derive a consistent slack and reset the duals.
      s_ = pr_.b - pr_.a * x_;
      project(s_);
    }
  }

  void set_rho_vectors() {
    rho_vec_.resize(pr_.m);
    rho_inv_.resize(pr_.m);
    for (int i = 0; i < pr_.m; ++i) {
      rho_vec_[i] = zero_row_[static_cast<std::size_t>(i)] ? 1e3 * rho_ : rho_;
      rho_inv_[i] = 1.0 / rho_vec_[i];
    }
  }

  void factor(bool analyze) {
    const int n = pr_.n;
    const int m = pr_.m;
    std::vector<Eigen::Triplet<double>> kt;
    kt.reserve(static_cast<std::size_t>(pr_.p.nonZeros() + pr_.a.nonZeros() + n + m));
    for (int j = 0; j < pr_.p.outerSize(); ++j)
      for (SpMat::InnerIterator k(pr_.p, j); k; ++k)
        if (k.row() <= j) kt.emplace_back(k.row(), j, k.value());
    for (int j = 0; j < n; ++j) kt.emplace_back(j, j, settings_.sigma);
    for (int j = 0; j < pr_.a.outerSize(); ++j)
      for (SpMat::InnerIterator k(pr_.a, j); k; ++k) kt.emplace_back(j, n + k.row(), k.value());
    for (int i = 0; i < m; ++i) kt.emplace_back(n + i, n + i, -rho_inv_[i]);
    kkt_.resize(n + m, n + m);
    kkt_.setFromTriplets(kt.begin(), kt.end());
    if (analyze) ldlt_.analyzePattern(kkt_);
    ldlt_.factorize(kkt_);
    if (ldlt_.info() != Eigen::Success) throw InvalidInput("KKT factorization failed (is P positive semidefinite?)");
  }

  // LDL' solve plus refinement steps; large rho makes the quasi-definite
  // system ill conditioned.
  void solve_kkt(const Vec& rhs, Vec& sol) const {
    sol = ldlt_.solve(rhs);
    const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>();
    for (int k = 0; k < kRefineSteps; ++k) {
      Vec r = rhs - kkt_.selfadjointView<Eigen::Upper>() * sol;
      if (r.lpNorm<Eigen::Infinity>() <= 1e-14 * scale) break;
      sol += ldlt_.solve(r);
    }
  }

  void project(Vec& v) const {
    for (const auto& blk : pr_.blocks) {
      project_cone_inplace(std::span<double>(v.data() + blk.offset, static_cast<std::size_t>(blk.cone.dim)), blk.cone);
    }
  }

  void compute_residuals() {
    ax_ = pr_.a * x_;
    px_ = pr_.p * x_;
    aty_ = at_ * (-y_);

    Vec rp = (ax_ + s_ - pr_.b).cwiseProduct(einv_);
    const double rp_n = kernels::norm_inf(std::span<const double>(rp.data(), static_cast<std::size_t>(rp.size())));
    const double prim_scale = std::max({norm_inf_scaled(ax_, einv_), norm_inf_scaled(s_, einv_),
                                        norm_inf_scaled(pr_.b, einv_)});
    Vec rd = (px_ + pr_.q + aty_).cwiseProduct(dinv_) / sc_.c;
    const double rd_n = kernels::norm_inf(std::span<const double>(rd.data(), static_cast<std::size_t>(rd.size())));
    const double dual_scale = std::max({norm_inf_scaled(px_, dinv_), norm_inf_scaled(aty_, dinv_),
                                        norm_inf_scaled(pr_.q, dinv_)}) / sc_.c;
    prim_res_ = rp_n / (1.0 + prim_scale);
    dual_res_ = rd_n / (1.0 + dual_scale);

    const double xpx = x_.dot(px_) / sc_.c;
    const double qx = pr_.q.dot(x_) / sc_.c;
    const double by = -pr_.b.dot(y_) / sc_.c;
    gap_ = std::abs(xpx + qx + by) / (1.0 + std::max({std::abs(xpx), std::abs(qx), std::abs(by)}));
  }

  static double norm_inf_scaled(const Vec& v, const Vec& w) {
    if (v.size() == 0) return 0.0;
    return v.cwiseProduct(w).lpNorm<Eigen::Infinity>();
  }

  bool converged() const {
    const double tol = settings_.tol;
    return prim_res_ <= tol && dual_res_ <= tol && gap_ <= tol;
  }

  // Certificate: lambda in K*, A' lambda = 0, b' lambda < 0, with lambda
  // taken from successive differences of the (diverging) dual iterates.
  bool primal_infeasible(const Vec& dy) const {
    if (pr_.m == 0) return false;
    Vec dl = (-dy).cwiseProduct(sc_.e) / sc_.c;
    const double nrm = dl.lpNorm<Eigen::Infinity>();
    if (nrm < 1e-12) return false;
    const double eps = settings_.infeasibility_tol;
    Vec atl = (at_ * (-dy)).cwiseProduct(dinv_) / sc_.c;
    if (atl.lpNorm<Eigen::Infinity>() > eps * nrm) return false;
    const double bl = pr_.b.dot(-dy) / sc_.c;
    if (bl >= -eps * nrm) return false;
    Vec proj = dl;
    for (const auto& blk : pr_.blocks) {
      project_dual_cone_inplace(std::span<double>(proj.data() + blk.offset, static_cast<std::size_t>(blk.cone.dim)),
                                blk.cone);
    }
    return (proj - dl).lpNorm<Eigen::Infinity>() <= eps * nrm;
  }

  // Certificate: P dx = 0, q' dx < 0, -A dx in K.
  bool dual_infeasible(const Vec& dx_scaled) const {
    Vec dx = dx_scaled.cwiseProduct(sc_.d);
    const double nrm = dx.lpNorm<Eigen::Infinity>();
    if (nrm < 1e-12) return false;
    const double eps = settings_.infeasibility_tol;
    Vec pdx = (pr_.p * dx_scaled).cwiseProduct(dinv_) / sc_.c;
    if (pdx.lpNorm<Eigen::Infinity>() > eps * nrm) return false;
    if (pr_.q.dot(dx_scaled) / sc_.c >= -eps * nrm) return false;
    if (pr_.m == 0) return true;
    Vec adx = -(pr_.a * dx_scaled).cwiseProduct(einv_);
    Vec proj = adx;
    for (const auto& blk : pr_.blocks) {
      project_cone_inplace(std::span<double>(proj.data() + blk.offset, static_cast<std::size_t>(blk.cone.dim)),
                           blk.cone);
    }
    return (proj - adx).lpNorm<Eigen::Infinity>() <= eps * nrm;
  }

  void adapt_rho() {
    const double ratio = std::sqrt((prim_res_ + 1e-30) / (dual_res_ + 1e-30));
    const double rho_new = std::clamp(rho_ * ratio, 1e-6, 1e6);
    if (rho_new > 2.0 * rho_ || rho_new < 0.5 * rho_) {
      rho_ = rho_new;
      set_rho_vectors();
      factor(false);
    }
  }

  void fill_result(SolveResult& res) {
    compute_residuals();
    Vec x = x_.cwiseProduct(sc_.d);
    Vec s = s_.cwiseProduct(einv_);
    Vec y = (-y_).cwiseProduct(sc_.e) / sc_.c;
    res.x.assign(x.data(), x.data() + x.size());
    res.s.assign(s.data(), s.data() + s.size());
    res.y.assign(y.data(), y.data() + y.size());
    res.objective = prog_.objective(res.x);
    res.primal_residual = prim_res_;
    res.dual_residual = dual_res_;
    res.gap = gap_;
    res.final_rho = rho_;
  }

  const ConicProgram& prog_;
  SolverSettings settings_;
  Assembled pr_;
  Scaling sc_;
  SpMat at_;
  Vec dinv_, einv_;
  std::vector<bool> zero_row_;
  static constexpr int kRefineSteps = 2;
  SpMat kkt_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Upper> ldlt_;

  Vec x_, s_, y_;
  Vec rho_vec_, rho_inv_;
  double rho_ = 0.1;
  Vec ax_, px_, aty_;
  double prim_res_ = 0.0, dual_res_ = 0.0, gap_ = 0.0;
};

}  // namespace

int internal_row_count(const ConicProgram& prog) {
  int m = prog.num_rows();
  for (int i = 0; i < prog.num_vars(); ++i) {
    if (std::isfinite(prog.upper()[static_cast<std::size_t>(i)])) ++m;
    if (std::isfinite(prog.lower()[static_cast<std::size_t>(i)])) ++m;
  }
  return m;
}

WarmStart warm_start(const SolveResult& prev, const ConicProgram& prog) {
  WarmStart w;
  w.x = prev.x;
  if (static_cast<int>(prev.x.size()) == prog.num_vars() &&
      static_cast<int>(prev.s.size()) == internal_row_count(prog) && prev.s.size() == prev.y.size()) {
    w.s = prev.s;
    w.y = prev.y;
    w.rho = prev.final_rho;
  }
  return w;
}

SolveResult solve(const ConicProgram& prog, const SolverSettings& settings) {
  prog.validate();
  if (!prog.binaries().empty()) throw InvalidInput("solve: program has binary variables; use solve_mip");
  if (!(settings.tol > 0.0) || settings.max_iters < 1 || settings.check_interval < 1 || !(settings.rho > 0.0) ||
      !(settings.sigma > 0.0) || !(settings.alpha > 0.0 && settings.alpha < 2.0)) {
    throw InvalidInput("solve: invalid solver settings");
  }
  Admm admm(prog, settings);
  return admm.run();
}

}  // namespace hullmpc
