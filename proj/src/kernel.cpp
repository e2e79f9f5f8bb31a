// Copyright 2026 The MVPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mvps/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "mvps/error.hpp"

namespace mvps {

using nlohmann::json;

// ---------------------------------------------------------------- Partition

Partition::Partition(FiniteSpace space,
                     std::vector<std::vector<std::size_t>> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)) {
  const std::size_t k = space_.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  block_of_.assign(k, kUnset);
  for (auto& b : blocks_) {
    if (b.empty()) throw Error(ErrorCode::kBadPartition, "empty block");
    std::sort(b.begin(), b.end());
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    for (std::size_t x : blocks_[j]) {
      if (x >= k) throw Error(ErrorCode::kBadPartition, "state out of range");
      if (block_of_[x] != kUnset) {
        throw Error(ErrorCode::kBadPartition,
                    "state '" + space_.label(x) + "' appears in two blocks");
      }
      block_of_[x] = j;
    }
  }
  for (std::size_t x = 0; x < k; ++x) {
    if (block_of_[x] == kUnset) {
      throw Error(ErrorCode::kBadPartition,
                  "state '" + space_.label(x) + "' is not covered");
    }
  }
}

Partition Partition::FromBlockOf(FiniteSpace space,
                                 std::span<const std::size_t> block_of) {
  if (block_of.size() != space.size()) {
    throw Error(ErrorCode::kBadPartition, "block_of length mismatch");
  }
  std::size_t m = 0;
  for (std::size_t b : block_of) m = std::max(m, b + 1);
  std::vector<std::vector<std::size_t>> blocks(m);
  for (std::size_t x = 0; x < block_of.size(); ++x) {
    blocks[block_of[x]].push_back(x);
  }
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  return Partition(std::move(space), std::move(blocks));
}

Partition Partition::Singletons(FiniteSpace space) {
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t x = 0; x < space.size(); ++x) blocks.push_back({x});
  return Partition(std::move(space), std::move(blocks));
}

Partition Partition::OneBlock(FiniteSpace space) {
  std::vector<std::size_t> all(space.size());
  std::iota(all.begin(), all.end(), 0);
  return Partition(std::move(space), {all});
}

std::string Partition::block_label(std::size_t j) const {
  std::string out;
  for (std::size_t x : blocks_.at(j)) {
    if (!out.empty()) out += '+';
    out += space_.label(x);
  }
  return out;
}

std::vector<std::vector<std::string>> Partition::block_labels() const {
  std::vector<std::vector<std::string>> out;
  for (const auto& b : blocks_) {
    auto& labels = out.emplace_back();
    for (std::size_t x : b) labels.push_back(space_.label(x));
  }
  return out;
}

FiniteSpace Partition::block_space() const {
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    labels.push_back(block_label(j));
  }
  return FiniteSpace(std::move(labels));
}

ProbabilityVector Partition::push_forward(const ProbabilityVector& nu) const {
  RequireSameSpace(space_, nu.space());
  std::vector<double> w(blocks_.size(), 0.0);
  for (std::size_t j = 0; j < blocks_.size(); ++j) w[j] = nu.mass_of(blocks_[j]);
  return normalize(FiniteMeasure(block_space(), std::move(w)));
}

bool operator==(const Partition& a, const Partition& b) {
  return a.space_ == b.space_ && a.blocks_ == b.blocks_;
}

// ------------------------------------------------------------- FiniteKernel

FiniteKernel::FiniteKernel(FiniteSpace space, std::vector<double> row_major)
    : space_(std::move(space)), entries_(std::move(row_major)) {
  Init();
}

FiniteKernel::FiniteKernel(FiniteSpace space,
                           const std::vector<std::vector<double>>& rows)
    : space_(std::move(space)) {
  if (rows.size() != space_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "kernel needs one row per state");
  }
  for (const auto& r : rows) {
    if (r.size() != space_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "kernel row has wrong length");
    }
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  Init();
}

void FiniteKernel::Init() {
  const std::size_t k = space_.size();
  if (entries_.size() != k * k) {
    throw Error(ErrorCode::kInvalidArgument, "kernel matrix must be k x k");
  }
  for (double& v : entries_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "kernel entries must be finite");
    }
    if (v < -kTol) {
      throw Error(ErrorCode::kNegativeEntries,
                  "kernel has negative entries; see detect_negative");
    }
    if (v < 0.0) v = 0.0;
  }
  masses_.assign(k, 0.0);
  for (std::size_t x = 0; x < k; ++x) {
    const auto r = row(x);
    masses_[x] = std::accumulate(r.begin(), r.end(), 0.0);
  }
}

FiniteKernel FiniteKernel::Identity(FiniteSpace space) {
  const std::size_t k = space.size();
  std::vector<double> e(k * k, 0.0);
  for (std::size_t x = 0; x < k; ++x) e[x * k + x] = 1.0;
  return FiniteKernel(std::move(space), std::move(e));
}

FiniteKernel FiniteKernel::Constant(const ProbabilityVector& nu) {
  const std::size_t k = nu.size();
  std::vector<double> e;
  e.reserve(k * k);
  for (std::size_t x = 0; x < k; ++x) {
    e.insert(e.end(), nu.weights().begin(), nu.weights().end());
  }
  return FiniteKernel(nu.space(), std::move(e));
}

FiniteMeasure FiniteKernel::row_measure(std::size_t x) const {
  const auto r = row(x);
  return FiniteMeasure(space_, std::vector<double>(r.begin(), r.end()));
}

std::vector<std::size_t> FiniteKernel::null_set() const {
  std::vector<std::size_t> z;
  for (std::size_t x = 0; x < size(); ++x) {
    if (is_null(x)) z.push_back(x);
  }
  return z;
}

bool FiniteKernel::is_canonical() const {
  for (std::size_t x = 0; x < size(); ++x) {
    if (!is_null(x) && std::abs(masses_[x] - 1.0) > kTol) return false;
  }
  return true;
}

// ------------------------------------------------------------------ Checks

namespace {

json Labels(const FiniteSpace& space, std::span<const std::size_t> states) {
  json out = json::array();
  for (std::size_t x : states) out.push_back(space.label(x));
  return out;
}

// Mass-weighted scale c = nu(f).
double Scale(const FiniteKernel& kernel, const ProbabilityVector& nu) {
  double c = 0.0;
  for (std::size_t x = 0; x < kernel.size(); ++x) c += nu[x] * kernel.mass(x);
  return c;
}

std::vector<std::size_t> IgnoredStates(const ProbabilityVector& nu) {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < nu.size(); ++x) {
    if (nu[x] <= 0.0) out.push_back(x);
  }
  return out;
}

}  // namespace

CheckReport detect_negative(const FiniteSpace& space,
                            std::span<const double> row_major) {
  const std::size_t k = space.size();
  if (row_major.size() != k * k) {
    throw Error(ErrorCode::kInvalidArgument, "kernel matrix must be k x k");
  }
  CheckReport report("non-negative", kTol);
  double most_negative = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      const double v = row_major[x * k + y];
      if (v < most_negative) {
        most_negative = v;
        report.witness = json{{"row", space.label(x)},
                              {"column", space.label(y)},
                              {"value", v}};
      }
    }
  }
  report.max_residual = -most_negative;
  report.details["min_entry"] = most_negative;
  report.finalize();
  return report;
}

CheckReport check_balanced(const FiniteKernel& kernel,
                           const ProbabilityVector& nu) {
  RequireSameSpace(kernel.space(), nu.space());
  CheckReport report("balanced", kTol);
  double lo = 0.0, hi = 0.0;
  bool any = false;
  std::size_t lo_state = 0, hi_state = 0;
  for (std::size_t x = 0; x < kernel.size(); ++x) {
    if (nu[x] <= 0.0 || kernel.is_null(x)) continue;
    const double f = kernel.mass(x);
    if (!any || f < lo) { lo = f; lo_state = x; }
    if (!any || f > hi) { hi = f; hi_state = x; }
    any = true;
  }
  if (!any) {
    throw Error(ErrorCode::kEmptyPositivePart,
                "nu puts no mass on states with positive reinforcement");
  }
  report.max_residual = hi - lo;
  if (hi - lo > 0.0) {
    report.witness = json{{"min_state", kernel.space().label(lo_state)},
                          {"min_mass", lo},
                          {"max_state", kernel.space().label(hi_state)},
                          {"max_mass", hi},
                          {"residual", hi - lo}};
  }
  report.finalize();
  if (report.passed) report.details["m"] = hi;
  const auto z = kernel.null_set();
  report.data["null_set"] = Labels(kernel.space(), z);
  report.data["ignored"] = Labels(kernel.space(), IgnoredStates(nu));
  json masses = json::object();
  for (std::size_t x = 0; x < kernel.size(); ++x) {
    masses[kernel.space().label(x)] = kernel.mass(x);
  }
  report.data["masses"] = std::move(masses);
  return report;
}

FiniteKernel canonicalize(const FiniteKernel& kernel) {
  std::vector<double> e(kernel.entries().begin(), kernel.entries().end());
  const std::size_t k = kernel.size();
  for (std::size_t x = 0; x < k; ++x) {
    if (kernel.is_null(x)) {
      std::fill_n(e.begin() + x * k, k, 0.0);
      continue;
    }
    const double f = kernel.mass(x);
    // Rows already at mass 1 up to summation rounding are kept as they are,
    // which makes canonicalize an exact fixed point.
    if (std::abs(f - 1.0) <= 4.0 * static_cast<double>(k) *
                                 std::numeric_limits<double>::epsilon()) {
      continue;
    }
    for (std::size_t y = 0; y < k; ++y) e[x * k + y] /= f;
  }
  return FiniteKernel(kernel.space(), std::move(e));
}

CheckReport check_scaled_stationarity(const FiniteKernel& kernel,
                                      const ProbabilityVector& nu) {
  RequireSameSpace(kernel.space(), nu.space());
  CheckReport report("stationary", kTol);
  const double c = Scale(kernel, nu);
  const std::size_t k = kernel.size();
  for (std::size_t y = 0; y < k; ++y) {
    double lhs = 0.0;
    for (std::size_t x = 0; x < k; ++x) lhs += nu[x] * kernel(x, y);
    const double rhs = c * nu[y];
    report.observe(std::abs(lhs - rhs), json{{"state", kernel.space().label(y)},
                                             {"nu_R", lhs},
                                             {"c_nu", rhs}});
  }
  report.details["c"] = c;
  report.finalize();
  return report;
}

CheckReport check_scaled_stationarity_on_blocks(const FiniteKernel& kernel,
                                                const ProbabilityVector& nu,
                                                const Partition& blocks) {
  RequireSameSpace(kernel.space(), nu.space());
  RequireSameSpace(kernel.space(), blocks.space());
  CheckReport report("stationary-on-blocks", kTol);
  const double c = Scale(kernel, nu);
  for (std::size_t j = 0; j < blocks.num_blocks(); ++j) {
    double lhs = 0.0;
    for (std::size_t x = 0; x < kernel.size(); ++x) {
      double rb = 0.0;
      for (std::size_t y : blocks.block(j)) rb += kernel(x, y);
      lhs += nu[x] * rb;
    }
    const double rhs = c * nu.mass_of(blocks.block(j));
    report.observe(std::abs(lhs - rhs), json{{"block", blocks.block_label(j)},
                                             {"nu_R", lhs},
                                             {"c_nu", rhs}});
  }
  report.details["c"] = c;
  report.finalize();
  return report;
}

CheckReport check_self_averaging(const FiniteKernel& kernel,
                                 const ProbabilityVector& nu) {
  RequireSameSpace(kernel.space(), nu.space());
  CheckReport report("self-averaging", kTol);
  const double c = Scale(kernel, nu);
  const std::size_t k = kernel.size();
  for (std::size_t x = 0; x < k; ++x) {
    if (nu[x] <= 0.0) continue;
    for (std::size_t y = 0; y < k; ++y) {
      double rr = 0.0;
      for (std::size_t z = 0; z < k; ++z) rr += kernel(x, z) * kernel(z, y);
      const double rhs = c * kernel(x, y);
      report.observe(std::abs(rr - rhs), json{{"row", kernel.space().label(x)},
                                              {"column", kernel.space().label(y)},
                                              {"RR", rr},
                                              {"c_R", rhs}});
    }
  }
  report.details["c"] = c;
  report.data["ignored"] = Labels(kernel.space(), IgnoredStates(nu));
  report.finalize();
  return report;
}

Partition atoms_of_kernel(const FiniteKernel& kernel) {
  const FiniteKernel canon = canonicalize(kernel);
  const std::size_t k = canon.size();
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> null_block;
  for (std::size_t x = 0; x < k; ++x) {
    if (canon.is_null(x)) {
      null_block.push_back(x);
      continue;
    }
    bool placed = false;
    for (auto& b : blocks) {
      const auto rep = canon.row(b.front());
      const auto cur = canon.row(x);
      bool same = true;
      for (std::size_t y = 0; y < k && same; ++y) {
        same = std::abs(rep[y] - cur[y]) <= kTol;
      }
      if (same) {
        b.push_back(x);
        placed = true;
        break;
      }
    }
    if (!placed) blocks.push_back({x});
  }
  if (!null_block.empty()) blocks.push_back(std::move(null_block));
  return Partition(kernel.space(), std::move(blocks));
}

CheckReport check_proper(const FiniteKernel& kernel,
                         const ProbabilityVector& nu,
                         const Partition& partition) {
  RequireSameSpace(kernel.space(), nu.space());
  RequireSameSpace(kernel.space(), partition.space());
  CheckReport report("proper", kTol);
  const FiniteKernel canon = canonicalize(kernel);
  std::vector<std::size_t> skipped;
  for (std::size_t x = 0; x < canon.size(); ++x) {
    if (nu[x] <= 0.0 || canon.is_null(x)) {
      skipped.push_back(x);
      continue;
    }
    const std::size_t j = partition.block_of(x);
    double own = 0.0;
    for (std::size_t y : partition.block(j)) own += canon(x, y);
    report.observe(std::abs(own - 1.0),
                   json{{"state", canon.space().label(x)},
                        {"block", partition.block_label(j)},
                        {"mass_on_own_block", own}});
  }
  report.data["ignored"] = Labels(kernel.space(), skipped);
  report.finalize();
  return report;
}

namespace {

// Strongly connected components (Tarjan) of the graph restricted to `nodes`.
std::vector<std::vector<std::size_t>> StronglyConnected(
    const std::vector<std::size_t>& nodes,
    const std::function<bool(std::size_t, std::size_t)>& edge) {
  const std::size_t n = nodes.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < n; ++w) {
      if (!edge(nodes[v], nodes[w])) continue;
      if (index[w] == kUnvisited) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      auto& comp = out.emplace_back();
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(nodes[w]);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] == kUnvisited) visit(v);
  }
  return out;
}

}  // namespace

Decomposition decompose_blocks(const FiniteKernel& kernel,
                               const ProbabilityVector& nu) {
  RequireSameSpace(kernel.space(), nu.space());
  for (std::size_t x = 0; x < nu.size(); ++x) {
    if (!(nu[x] > 0.0)) {
      throw Error(ErrorCode::kPositiveSupportRequired,
                  "decompose_blocks needs nu(x) > 0 for every state");
    }
  }
  const FiniteKernel canon = canonicalize(kernel);
  const std::size_t k = canon.size();
  const std::vector<std::size_t> z = canon.null_set();
  std::vector<bool> in_z(k, false);
  for (std::size_t x : z) in_z[x] = true;
  std::vector<std::size_t> live;
  for (std::size_t x = 0; x < k; ++x) {
    if (!in_z[x]) live.push_back(x);
  }

  Decomposition out;
  out.report = CheckReport("decompose", kTol);
  const double nu_live = z.empty() ? 1.0 : nu.mass_of(live);

  const auto classes = StronglyConnected(
      live, [&](std::size_t a, std::size_t b) { return canon(a, b) > kTol; });

  std::vector<std::size_t> class_of(k, 0);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t x : classes[c]) class_of[x] = c;
  }
  json closed = json::array();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    bool is_closed = true;
    for (std::size_t x : classes[c]) {
      for (std::size_t y : live) {
        if (class_of[y] != c && canon(x, y) > kTol) is_closed = false;
      }
    }
    closed.push_back(is_closed);
  }

  // Expected row on class C: nu(Z^c) nu(.|C) + nu(Z) nu(.|Z).
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& cls = classes[c];
    const double nu_c = nu.mass_of(cls);
    std::vector<double> expected(k, 0.0);
    for (std::size_t y : cls) expected[y] = nu_live * nu[y] / nu_c;
    for (std::size_t y : z) expected[y] = nu[y];
    for (std::size_t x : cls) {
      for (std::size_t y = 0; y < k; ++y) {
        out.report.observe(
            std::abs(canon(x, y) - expected[y]),
            json{{"row", canon.space().label(x)},
                 {"column", canon.space().label(y)},
                 {"class", Labels(canon.space(), cls)},
                 {"closed", closed[c]},
                 {"actual", canon(x, y)},
                 {"expected", expected[y]}});
      }
    }
  }
  out.report.finalize();

  json class_json = json::array();
  for (const auto& cls : classes) class_json.push_back(Labels(canon.space(), cls));
  out.report.data["classes"] = class_json;
  out.report.data["closed"] = closed;
  out.report.data["null_set"] = Labels(canon.space(), z);

  if (out.report.passed) {
    std::vector<std::vector<std::size_t>> blocks = classes;
    if (!z.empty()) blocks.push_back(z);
    Partition p(canon.space(), std::move(blocks));
    if (!z.empty()) out.null_block = p.block_of(z.front());
    out.report.data["blocks"] = p.block_labels();
    out.partition = std::move(p);
  }
  return out;
}

FiniteKernel exchangeable_kernel_from_partition(
    const ProbabilityVector& nu, const Partition& partition,
    std::span<const std::size_t> null_set) {
  RequireSameSpace(nu.space(), partition.space());
  const std::size_t k = nu.size();
  std::vector<bool> in_z(k, false);
  for (std::size_t x : null_set) {
    if (x >= k) throw Error(ErrorCode::kBadNullSet, "null state out of range");
    if (in_z[x]) throw Error(ErrorCode::kBadNullSet, "duplicate null state");
    in_z[x] = true;
  }
  double nu_live = 0.0;
  for (std::size_t x = 0; x < k; ++x) {
    if (!in_z[x]) nu_live += nu[x];
  }
  if (!(nu_live > kTol)) {
    throw Error(ErrorCode::kBadNullSet, "nu(Z) must be < 1");
  }
  for (std::size_t j = 0; j < partition.num_blocks(); ++j) {
    const auto& b = partition.block(j);
    const auto nz = std::count_if(b.begin(), b.end(),
                                  [&](std::size_t x) { return in_z[x]; });
    if (nz != 0 && static_cast<std::size_t>(nz) != b.size()) {
      throw Error(ErrorCode::kBadPartition,
                  "block " + partition.block_label(j) + " straddles Z");
    }
    if (nz == 0 && !(nu.mass_of(b) > 0.0)) {
      throw Error(ErrorCode::kBadPartition,
                  "block " + partition.block_label(j) + " has zero nu-mass");
    }
  }
  const double live_factor = null_set.empty() ? 1.0 : nu_live;
  std::vector<double> e(k * k, 0.0);
  for (std::size_t x = 0; x < k; ++x) {
    if (in_z[x]) continue;
    const auto& b = partition.block(partition.block_of(x));
    const double nu_b = nu.mass_of(b);
    for (std::size_t y : b) e[x * k + y] = live_factor * nu[y] / nu_b;
    // nu(Z) nu(.|Z) is nu restricted to Z.
    for (std::size_t y : null_set) e[x * k + y] += nu[y];
  }
  return FiniteKernel(nu.space(), std::move(e));
}

}  // namespace mvps
