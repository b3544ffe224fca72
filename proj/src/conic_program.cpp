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

#include "hullmpc/conic_program.hpp"

#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>

#include "hullmpc/error.hpp"

namespace hullmpc {

using nlohmann::json;

ConicProgram::ConicProgram(int num_vars) {
  if (num_vars < 0) throw InvalidInput("ConicProgram: negative variable count");
  add_variables(num_vars);
}

int ConicProgram::add_variables(int count) {
  if (count < 0) throw InvalidInput("add_variables: negative count");
  const int first = n_;
  n_ += count;
  q_.resize(static_cast<std::size_t>(n_), 0.0);
  lower_.resize(static_cast<std::size_t>(n_), -kInf);
  upper_.resize(static_cast<std::size_t>(n_), kInf);
  return first;
}

void ConicProgram::check_index(int i, const char* what) const {
  if (i < 0 || i >= n_) {
    throw InvalidInput(std::string(what) + ": variable index " + std::to_string(i) + " out of range [0, " +
                       std::to_string(n_) + ")");
  }
}

void ConicProgram::add_quadratic(int i, int j, double weight) {
  check_index(i, "add_quadratic");
  check_index(j, "add_quadratic");
  if (weight == 0.0) return;
  // 1/2 x'Px convention: weight * x_i^2 -> P_ii += 2*weight,
  // weight * x_i x_j -> P_ij = P_ji += weight.
  if (i == j) {
    p_.push_back({i, i, 2.0 * weight});
  } else {
    p_.push_back({i, j, weight});
    p_.push_back({j, i, weight});
  }
}

void ConicProgram::add_linear(int i, double weight) {
  check_index(i, "add_linear");
  q_[static_cast<std::size_t>(i)] += weight;
}

void ConicProgram::add_block(ConstraintBlock block) {
  hullmpc::validate(block.cone);
  if (static_cast<int>(block.b.size()) != block.cone.dim) {
    throw InvalidInput("constraint block '" + block.label + "': b length != cone dim");
  }
  for (const Triplet& t : block.a) {
    check_index(t.col, "add_block");
    if (t.row < 0 || t.row >= block.cone.dim) {
      throw InvalidInput("constraint block '" + block.label + "': row index out of range");
    }
  }
  blocks_.push_back(std::move(block));
}

void ConicProgram::set_bounds(int i, double lower, double upper) {
  check_index(i, "set_bounds");
  if (!(lower <= upper)) throw InvalidInput("set_bounds: lower > upper for variable " + std::to_string(i));
  lower_[static_cast<std::size_t>(i)] = lower;
  upper_[static_cast<std::size_t>(i)] = upper;
}

void ConicProgram::mark_binary(int i) {
  check_index(i, "mark_binary");
  binaries_.insert(i);
  set_bounds(i, 0.0, 1.0);
}

int ConicProgram::num_rows() const {
  int m = 0;
  for (const auto& blk : blocks_) m += blk.cone.dim;
  return m;
}

double ConicProgram::objective(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw InvalidInput("objective: x has wrong length");
  double quad = 0.0;
  for (const Triplet& t : p_) quad += x[static_cast<std::size_t>(t.row)] * t.value * x[static_cast<std::size_t>(t.col)];
  double lin = 0.0;
  for (int i = 0; i < n_; ++i) lin += q_[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  return 0.5 * quad + lin + offset_;
}

void ConicProgram::validate() const {
  if (n_ == 0) throw InvalidInput("program has no variables");
  for (const Triplet& t : p_) {
    check_index(t.row, "P");
    check_index(t.col, "P");
    if (!std::isfinite(t.value)) throw InvalidInput("P has a non-finite entry");
  }
  for (double v : q_)
    if (!std::isfinite(v)) throw InvalidInput("q has a non-finite entry");
  for (const auto& blk : blocks_) {
    hullmpc::validate(blk.cone);
    if (static_cast<int>(blk.b.size()) != blk.cone.dim) throw InvalidInput("block '" + blk.label + "': b length");
    for (double v : blk.b)
      if (!std::isfinite(v)) throw InvalidInput("block '" + blk.label + "': non-finite b");
    for (const Triplet& t : blk.a) {
      check_index(t.col, "A");
      if (t.row < 0 || t.row >= blk.cone.dim || !std::isfinite(t.value)) {
        throw InvalidInput("block '" + blk.label + "': bad A triplet");
      }
    }
  }
  for (int i = 0; i < n_; ++i) {
    const double l = lower_[static_cast<std::size_t>(i)];
    const double u = upper_[static_cast<std::size_t>(i)];
    if (std::isnan(l) || std::isnan(u) || l > u) throw InvalidInput("bad bounds on variable " + std::to_string(i));
  }
  for (int i : binaries_) {
    check_index(i, "binaries");
    if (lower_[static_cast<std::size_t>(i)] < 0.0 || upper_[static_cast<std::size_t>(i)] > 1.0) {
      throw InvalidInput("binary variable " + std::to_string(i) + " is not boxed to [0,1]");
    }
  }
}

ConicProgram ConicProgram::relaxed() const {
  ConicProgram copy = *this;
  copy.binaries_.clear();
  return copy;
}

namespace {

json bound_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return v;
}

double bound_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return ConicProgram::kInf;
    if (s == "-inf") return -ConicProgram::kInf;
    throw InvalidInput("program json: bad bound string '" + s + "'");
  }
  return j.get<double>();
}

json triplets_to_json(const std::vector<Triplet>& ts) {
  json arr = json::array();
  for (const auto& t : ts) arr.push_back({t.row, t.col, t.value});
  return arr;
}

std::vector<Triplet> triplets_from_json(const json& j) {
  std::vector<Triplet> out;
  for (const auto& e : j) out.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
  return out;
}

ConeKind kind_from_string(const std::string& s) {
  if (s == "zero") return ConeKind::kZero;
  if (s == "nonnegative") return ConeKind::kNonnegative;
  if (s == "second_order") return ConeKind::kSecondOrder;
  if (s == "psd") return ConeKind::kPositiveSemidefinite;
  throw InvalidInput("program json: unknown cone kind '" + s + "'");
}

}  // namespace

void ConicProgram::write_json(std::ostream& os) const {
  json j;
  j["format"] = "hullmpc-conic-program";
  j["version"] = 1;
  j["n"] = n_;
  j["offset"] = offset_;
  j["q"] = q_;
  j["P"] = triplets_to_json(p_);
  json lo = json::array(), up = json::array();
  for (int i = 0; i < n_; ++i) {
    lo.push_back(bound_to_json(lower_[static_cast<std::size_t>(i)]));
    up.push_back(bound_to_json(upper_[static_cast<std::size_t>(i)]));
  }
  j["lower"] = lo;
  j["upper"] = up;
  j["binaries"] = std::vector<int>(binaries_.begin(), binaries_.end());
  json blocks = json::array();
  for (const auto& blk : blocks_) {
    blocks.push_back({{"label", blk.label},
                      {"cone", {{"kind", to_string(blk.cone.kind)}, {"dim", blk.cone.dim}, {"side", blk.cone.side}}},
                      {"b", blk.b},
                      {"A", triplets_to_json(blk.a)}});
  }
  j["blocks"] = blocks;
  os << j.dump(1) << '\n';
}

ConicProgram ConicProgram::read_json(std::istream& is) {
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("program json: ") + e.what());
  }
  try {
    ConicProgram prog(j.at("n").get<int>());
    prog.offset_ = j.at("offset").get<double>();
    prog.q_ = j.at("q").get<std::vector<double>>();
    prog.p_ = triplets_from_json(j.at("P"));
    for (int i = 0; i < prog.n_; ++i) {
      prog.lower_[static_cast<std::size_t>(i)] = bound_from_json(j.at("lower").at(static_cast<std::size_t>(i)));
      prog.upper_[static_cast<std::size_t>(i)] = bound_from_json(j.at("upper").at(static_cast<std::size_t>(i)));
    }
    for (int i : j.at("binaries").get<std::vector<int>>()) prog.binaries_.insert(i);
    for (const auto& jb : j.at("blocks")) {
      ConstraintBlock blk;
      blk.label = jb.at("label").get<std::string>();
      const auto& jc = jb.at("cone");
      blk.cone = {kind_from_string(jc.at("kind").get<std::string>()), jc.at("dim").get<int>(), jc.at("side").get<int>()};
      blk.b = jb.at("b").get<std::vector<double>>();
      blk.a = triplets_from_json(jb.at("A"));
      prog.add_block(std::move(blk));
    }
    if (prog.q_.size() != static_cast<std::size_t>(prog.n_)) throw InvalidInput("program json: q length != n");
    prog.validate();
    return prog;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("program json: ") + e.what());
  }
}

}  // namespace hullmpc
