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

#include "mvps/exactlaw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "mvps/error.hpp"

namespace mvps {

using nlohmann::json;

std::uint64_t CheckedTupleCount(std::size_t k, std::size_t n) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= k;
    if (count > kEnumerationCap) {
      throw Error(ErrorCode::kTooLarge,
                  "enumeration exceeds the cap of 1e7 tuples (k^n = " +
                      std::to_string(k) + "^" + std::to_string(n) + ")");
    }
  }
  return count;
}

JointLaw::JointLaw(FiniteSpace space, std::size_t depth,
                   std::vector<double> table)
    : space_(std::move(space)), depth_(depth), table_(std::move(table)) {
  if (table_.size() != CheckedTupleCount(space_.size(), depth_)) {
    throw Error(ErrorCode::kInvalidArgument, "joint law table has wrong size");
  }
}

std::vector<std::size_t> JointLaw::tuple(std::size_t index) const {
  const std::size_t k = space_.size();
  std::vector<std::size_t> t(depth_);
  for (std::size_t i = depth_; i-- > 0;) {
    t[i] = index % k;
    index /= k;
  }
  return t;
}

std::size_t JointLaw::index_of(std::span<const std::size_t> tuple) const {
  if (tuple.size() != depth_) {
    throw Error(ErrorCode::kInvalidArgument, "tuple length != depth");
  }
  std::size_t index = 0;
  for (std::size_t x : tuple) index = index * space_.size() + x;
  return index;
}

JointLaw JointLaw::drop_last() const {
  if (depth_ == 0) throw Error(ErrorCode::kInvalidArgument, "depth is 0");
  const std::size_t k = space_.size();
  std::vector<double> out(table_.size() / k, 0.0);
  for (std::size_t i = 0; i < table_.size(); ++i) out[i / k] += table_[i];
  return JointLaw(space_, depth_ - 1, std::move(out));
}

namespace {

std::string TupleText(const FiniteSpace& space,
                      std::span<const std::size_t> t) {
  std::string s;
  for (std::size_t x : t) {
    if (!s.empty()) s += ' ';
    s += space.label(x);
  }
  return s;
}

json TupleJson(const FiniteSpace& space, std::span<const std::size_t> t) {
  json out = json::array();
  for (std::size_t x : t) out.push_back(space.label(x));
  return out;
}

}  // namespace

void JointLaw::write_csv(std::ostream& os) const {
  os << "tuple,probability\n";
  char buf[32];
  for (std::size_t i = 0; i < table_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", table_[i]);
    os << TupleText(space_, tuple(i)) << "," << buf << "\n";
  }
}

json JointLaw::to_json() const {
  json rows = json::array();
  for (std::size_t i = 0; i < table_.size(); ++i) {
    rows.push_back(json{{"tuple", TupleJson(space_, tuple(i))},
                        {"probability", table_[i]}});
  }
  return json{{"labels", space_.labels()}, {"depth", depth_}, {"table", rows}};
}

JointLaw joint_law(const UrnSpec& spec, std::size_t n) {
  const std::size_t k = spec.space().size();
  std::vector<double> table(CheckedTupleCount(k, n), 0.0);
  const UrnState root = UrnState::Initial(spec);
  std::function<void(const UrnState&, std::size_t, std::size_t, double)> visit =
      [&](const UrnState& state, std::size_t depth, std::size_t prefix,
          double prob) {
        if (depth == n) {
          table[prefix] = prob;
          return;
        }
        for (std::size_t x = 0; x < k; ++x) {
          const double px = prob * state.predictive_at(x);
          if (depth + 1 == n) {
            table[prefix * k + x] = px;
          } else {
            visit(step(state, x), depth + 1, prefix * k + x, px);
          }
        }
      };
  visit(root, 0, 0, 1.0);
  return JointLaw(spec.space(), n, std::move(table));
}

CheckReport check_exchangeable(const UrnSpec& spec, std::size_t n,
                               double tol) {
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument, "exchangeability needs n >= 2");
  }
  const JointLaw law = joint_law(spec, n);
  const FiniteSpace& space = spec.space();
  CheckReport report("exchangeable", tol);

  // Group tuples by their sorted version; the spread inside a group is the
  // permutation discrepancy.
  struct Spread {
    std::size_t lo_index, hi_index;
    double lo, hi;
  };
  std::map<std::vector<std::size_t>, Spread> groups;
  std::size_t zero_tuples = 0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    auto t = law.tuple(i);
    std::sort(t.begin(), t.end());
    const double p = law[i];
    if (p == 0.0) ++zero_tuples;
    auto [it, inserted] = groups.try_emplace(std::move(t), Spread{i, i, p, p});
    if (!inserted) {
      Spread& s = it->second;
      if (p < s.lo) { s.lo = p; s.lo_index = i; }
      if (p > s.hi) { s.hi = p; s.hi_index = i; }
    }
  }
  double permutation_residual = 0.0;
  for (const auto& [key, s] : groups) {
    const double r = s.hi - s.lo;
    permutation_residual = std::max(permutation_residual, r);
    if (r > 0.0) {
      report.observe(r, json{{"kind", "permutation"},
                             {"tuple_a", TupleJson(space, law.tuple(s.hi_index))},
                             {"probability_a", s.hi},
                             {"tuple_b", TupleJson(space, law.tuple(s.lo_index))},
                             {"probability_b", s.lo}});
    }
  }

  // Two-step symmetry P_h(a) P_{h+a}(b) = P_h(b) P_{h+b}(a).
  const std::size_t k = space.size();
  double two_step_residual = 0.0;
  std::size_t zero_histories = 0;
  std::vector<std::size_t> history;
  std::function<void(const UrnState&, double)> visit = [&](const UrnState& h,
                                                           double ph) {
    if (ph > 0.0) {
      std::vector<UrnState> next;
      next.reserve(k);
      for (std::size_t a = 0; a < k; ++a) next.push_back(step(h, a));
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          const double ab = h.predictive_at(a) * next[a].predictive_at(b);
          const double ba = h.predictive_at(b) * next[b].predictive_at(a);
          const double r = std::abs(ab - ba);
          two_step_residual = std::max(two_step_residual, r);
          if (r > 0.0) {
            report.observe(r, json{{"kind", "two-step"},
                                   {"history", TupleJson(space, history)},
                                   {"a", space.label(a)},
                                   {"b", space.label(b)},
                                   {"P_ab", ab},
                                   {"P_ba", ba}});
          }
        }
      }
    } else {
      ++zero_histories;
    }
    if (history.size() + 2 >= n) return;
    for (std::size_t x = 0; x < k; ++x) {
      history.push_back(x);
      visit(step(h, x), ph * h.predictive_at(x));
      history.pop_back();
    }
  };
  visit(UrnState::Initial(spec), 1.0);

  report.details["permutation_residual"] = permutation_residual;
  report.details["two_step_residual"] = two_step_residual;
  report.details["zero_probability_tuples"] = static_cast<double>(zero_tuples);
  report.details["zero_probability_histories"] =
      static_cast<double>(zero_histories);
  report.details["depth"] = static_cast<double>(n);
  report.finalize();
  return report;
}

CheckReport check_cid(const UrnSpec& spec, std::size_t depth, double tol) {
  const std::size_t k = spec.space().size();
  CheckedTupleCount(k, depth);
  CheckReport report("cid", tol);
  const FiniteSpace& space = spec.space();
  std::size_t visited = 0, skipped = 0;
  std::vector<std::size_t> history;
  std::function<void(const UrnState&, double)> visit = [&](const UrnState& h,
                                                           double ph) {
    if (!(ph > 0.0)) {
      ++skipped;
      return;
    }
    ++visited;
    std::vector<UrnState> next;
    next.reserve(k);
    for (std::size_t x = 0; x < k; ++x) next.push_back(step(h, x));
    for (std::size_t y = 0; y < k; ++y) {
      double avg = 0.0;
      for (std::size_t x = 0; x < k; ++x) {
        avg += h.predictive_at(x) * next[x].predictive_at(y);
      }
      const double cur = h.predictive_at(y);
      report.observe(std::abs(avg - cur),
                     json{{"history", TupleJson(space, history)},
                          {"state", space.label(y)},
                          {"expected_next", avg},
                          {"current", cur}});
    }
    if (history.size() + 1 >= depth) return;
    for (std::size_t x = 0; x < k; ++x) {
      history.push_back(x);
      visit(next[x], ph * h.predictive_at(x));
      history.pop_back();
    }
  };
  if (depth > 0) visit(UrnState::Initial(spec), 1.0);
  report.details["histories"] = static_cast<double>(visited);
  report.details["zero_probability_histories"] = static_cast<double>(skipped);
  report.details["depth"] = static_cast<double>(depth);
  report.finalize();
  return report;
}

CheckReport check_cid_structure(const FiniteKernel& kernel,
                                const ProbabilityVector& nu) {
  RequireSameSpace(kernel.space(), nu.space());
  for (std::size_t x = 0; x < kernel.size(); ++x) {
    if (kernel.is_null(x)) {
      throw Error(ErrorCode::kHypothesisViolated,
                  "c.i.d. structure check needs strictly positive "
                  "reinforcement (Z empty)");
    }
    if (!(nu[x] > 0.0)) {
      throw Error(ErrorCode::kHypothesisViolated,
                  "c.i.d. structure check needs nu(x) > 0 for every state");
    }
  }
  const Decomposition dec = decompose_blocks(kernel, nu);
  CheckReport report("cid-structure", kTol);
  report.observe(dec.report.max_residual,
                 json{{"condition", "block rows"},
                      {"witness", dec.report.witness.value_or(json(nullptr))}});
  report.data["decomposition"] = dec.report.to_json();

  // Distinct masses, grouped within kTol.
  std::vector<double> values(kernel.masses().begin(), kernel.masses().end());
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  for (double v : values) {
    if (distinct.empty() || v - distinct.back() > kTol) distinct.push_back(v);
  }
  auto value_of = [&](std::size_t x) {
    for (double a : distinct) {
      if (std::abs(kernel.mass(x) - a) <= kTol) return a;
    }
    return kernel.mass(x);
  };

  // Condition (ii) is also evaluated on the candidate classes when (i) fails
  // but the classes are all closed, so both violations get reported.
  std::optional<Partition> candidate = dec.partition;
  if (!candidate) {
    const json& closed = dec.report.data["closed"];
    const bool all_closed =
        std::all_of(closed.begin(), closed.end(),
                    [](const json& c) { return c.get<bool>(); });
    if (all_closed) {
      std::vector<std::vector<std::size_t>> blocks;
      for (const json& cls : dec.report.data["classes"]) {
        std::vector<std::size_t> block;
        for (const json& label : cls) {
          block.push_back(kernel.space().index_of(label.get<std::string>()));
        }
        blocks.push_back(std::move(block));
      }
      candidate.emplace(kernel.space(), std::move(blocks));
    }
  }

  if (candidate) {
    const Partition& blocks = *candidate;
    json table = json::array();
    for (double a : distinct) {
      double nu_a = 0.0;
      for (std::size_t x = 0; x < kernel.size(); ++x) {
        if (value_of(x) == a) nu_a += nu[x];
      }
      json by_block = json::object();
      for (std::size_t j = 0; j < blocks.num_blocks(); ++j) {
        double in = 0.0;
        for (std::size_t x : blocks.block(j)) {
          if (value_of(x) == a) in += nu[x];
        }
        const double cond = in / nu.mass_of(blocks.block(j));
        by_block[blocks.block_label(j)] = cond;
        report.observe(std::abs(cond - nu_a),
                       json{{"condition", "mass distribution"},
                            {"block", blocks.block_label(j)},
                            {"mass", a},
                            {"nu_mass_given_block", cond},
                            {"nu_mass", nu_a}});
      }
      table.push_back(json{{"mass", a}, {"nu", nu_a}, {"by_block", by_block}});
    }
    report.data["blocks"] = blocks.block_labels();
    report.data["mass_table"] = std::move(table);
  } else {
    report.data["mass_table"] = "not evaluated: transient classes";
  }
  report.finalize();
  return report;
}

double ps_joint_law(double theta, const ProbabilityVector& nu,
                    std::span<const std::size_t> labels) {
  if (!(theta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must be positive");
  }
  std::vector<std::size_t> counts(nu.size(), 0);
  double p = 1.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t x = labels[i];
    if (x >= nu.size()) {
      throw Error(ErrorCode::kInvalidArgument, "label out of range");
    }
    p *= (theta * nu[x] + static_cast<double>(counts[x])) /
         (theta + static_cast<double>(i));
    ++counts[x];
  }
  return p;
}

namespace {

JointLaw ProjectLaw(const JointLaw& law, const Partition& partition) {
  const FiniteSpace blocks = partition.block_space();
  const std::size_t n = law.depth();
  std::vector<double> table(CheckedTupleCount(blocks.size(), n), 0.0);
  JointLaw out(blocks, n, std::move(table));
  std::vector<double> acc(out.size(), 0.0);
  std::vector<std::size_t> mapped(n);
  for (std::size_t i = 0; i < law.size(); ++i) {
    const auto t = law.tuple(i);
    for (std::size_t j = 0; j < n; ++j) mapped[j] = partition.block_of(t[j]);
    acc[out.index_of(mapped)] += law[i];
  }
  return JointLaw(blocks, n, std::move(acc));
}

Projection Compare(JointLaw label_law,
                   const std::function<double(std::span<const std::size_t>)>&
                       reference,
                   const char* against) {
  CheckReport report("project-atoms", kTol);
  const FiniteSpace& space = label_law.space();
  for (std::size_t i = 0; i < label_law.size(); ++i) {
    const auto t = label_law.tuple(i);
    const double ref = reference(t);
    report.observe(std::abs(label_law[i] - ref),
                   json{{"tuple", TupleJson(space, t)},
                        {"projected", label_law[i]},
                        {"reference", ref}});
  }
  report.data["reference"] = against;
  report.data["block_labels"] = space.labels();
  report.finalize();
  return Projection{std::move(label_law), std::move(report)};
}

}  // namespace

Projection project_atoms_law(const UrnSpec& spec, const Partition& partition,
                             std::size_t n) {
  RequireSameSpace(spec.space(), partition.space());
  JointLaw labels = ProjectLaw(joint_law(spec, n), partition);
  const ProbabilityVector nu_pi = partition.push_forward(spec.nu);
  const double theta = spec.theta;
  return Compare(
      std::move(labels),
      [&](std::span<const std::size_t> t) {
        return ps_joint_law(theta, nu_pi, t);
      },
      "polya-sequence");
}

Projection project_atoms_law(const UrnSpec& spec, const Partition& partition,
                             std::size_t n, const UrnSpec& reference) {
  RequireSameSpace(spec.space(), partition.space());
  RequireSameSpace(partition.block_space(), reference.space());
  JointLaw labels = ProjectLaw(joint_law(spec, n), partition);
  const JointLaw ref = joint_law(reference, n);
  return Compare(
      std::move(labels),
      [&](std::span<const std::size_t> t) { return ref.probability(t); },
      "reference-urn");
}

UrnSpec null_projection_spec(double theta, const ProbabilityVector& nu,
                             const Partition& partition,
                             std::span<const std::size_t> null_set) {
  RequireSameSpace(nu.space(), partition.space());
  std::vector<bool> in_z(nu.size(), false);
  for (std::size_t x : null_set) in_z.at(x) = true;
  std::vector<std::size_t> null_blocks;
  for (std::size_t j = 0; j < partition.num_blocks(); ++j) {
    const auto& b = partition.block(j);
    const auto nz =
        std::count_if(b.begin(), b.end(), [&](std::size_t x) { return in_z[x]; });
    if (nz != 0 && static_cast<std::size_t>(nz) != b.size()) {
      throw Error(ErrorCode::kBadPartition,
                  "block " + partition.block_label(j) + " straddles Z");
    }
    if (nz != 0) null_blocks.push_back(j);
  }
  const ProbabilityVector nu_pi = partition.push_forward(nu);
  FiniteKernel r_pi = exchangeable_kernel_from_partition(
      nu_pi, Partition::Singletons(nu_pi.space()), null_blocks);
  return UrnSpec(theta, nu_pi, std::move(r_pi));
}

}  // namespace mvps
