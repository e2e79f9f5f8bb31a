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

#include "mvps/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "mvps/error.hpp"
#include "mvps/exactlaw.hpp"
#include "mvps/rng.hpp"

namespace mvps {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void RequireCheckpoints(std::span<const std::size_t> checkpoints,
                        std::size_t length, std::size_t min_step) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < min_step) {
      throw Error(ErrorCode::kInvalidArgument,
                  "checkpoint " + std::to_string(checkpoints[i]) +
                      " is below " + std::to_string(min_step));
    }
    if (checkpoints[i] > length) {
      throw Error(ErrorCode::kInvalidArgument,
                  "checkpoint " + std::to_string(checkpoints[i]) +
                      " exceeds trajectory length " + std::to_string(length));
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "checkpoints must be strictly increasing");
    }
  }
}

const FiniteSpace& SpaceOf(const Trajectory& traj) {
  if (!traj.spec) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory carries no urn spec");
  }
  return traj.spec->space();
}

TraceSeries TvTrace(const std::vector<ProbabilityVector>& p,
                    std::vector<std::size_t> steps) {
  TraceSeries out(std::move(steps));
  std::vector<double> tv;
  tv.reserve(p.size());
  for (const auto& pn : p) tv.push_back(tv_distance(pn, p.back()));
  out.add("tv", std::move(tv));
  if (!p.empty()) {
    for (std::size_t y = 0; y < p.front().size(); ++y) {
      std::vector<double> v;
      v.reserve(p.size());
      for (const auto& pn : p) v.push_back(pn[y]);
      out.add("P(" + p.front().space().label(y) + ")", std::move(v));
    }
  }
  return out;
}

}  // namespace

void TraceSeries::add(std::string name, std::vector<double> values) {
  if (values.size() != steps_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "series '" + name + "' has the wrong length");
  }
  if (has(name)) {
    throw Error(ErrorCode::kInvalidArgument, "series '" + name + "' repeated");
  }
  series_.emplace_back(std::move(name), std::move(values));
}

bool TraceSeries::has(const std::string& name) const {
  return std::any_of(series_.begin(), series_.end(),
                     [&](const auto& s) { return s.first == name; });
}

const std::vector<double>& TraceSeries::at(const std::string& name) const {
  for (const auto& s : series_) {
    if (s.first == name) return s.second;
  }
  throw Error(ErrorCode::kInvalidArgument, "no series '" + name + "'");
}

void TraceSeries::write_csv(std::ostream& os, const std::string& name) const {
  const auto& values = at(name);
  os << "step,value\n";
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    os << steps_[i] << ',' << Num(values[i]) << '\n';
  }
}

void TraceSeries::write_csv(std::ostream& os) const {
  os << "step";
  for (const auto& s : series_) os << ',' << s.first;
  os << '\n';
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    os << steps_[i];
    for (const auto& s : series_) os << ',' << Num(s.second[i]);
    os << '\n';
  }
}

nlohmann::json TraceSeries::to_json() const {
  nlohmann::json series = nlohmann::json::array();
  for (const auto& s : series_) {
    series.push_back({{"name", s.first}, {"values", s.second}});
  }
  return {{"steps", steps_}, {"series", series}};
}

TraceSeries TraceSeries::from_json(const nlohmann::json& j) {
  TraceSeries out(j.at("steps").get<std::vector<std::size_t>>());
  for (const auto& s : j.at("series")) {
    out.add(s.at("name").get<std::string>(),
            s.at("values").get<std::vector<double>>());
  }
  return out;
}

std::vector<ProbabilityVector> predictives_at(
    const Trajectory& traj, std::span<const std::size_t> checkpoints) {
  RequireCheckpoints(checkpoints, traj.draws.size(), 0);
  std::vector<ProbabilityVector> out;
  out.reserve(checkpoints.size());
  if (!traj.spec) {
    if (traj.snapshots.size() != traj.draws.size() + 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "trajectory has neither a spec nor snapshots");
    }
    const FiniteSpace space = FiniteSpace::Numbered(traj.snapshots[0].size());
    for (std::size_t n : checkpoints) {
      out.push_back(normalize(FiniteMeasure(space, traj.snapshots[n])));
    }
    return out;
  }
  UrnState state(traj.spec);
  std::size_t next = 0;
  for (std::size_t n = 0; n <= traj.draws.size() && next < checkpoints.size();
       ++n) {
    if (n == checkpoints[next]) {
      out.push_back(predictive(state));
      ++next;
    }
    if (n < traj.draws.size()) state.advance(traj.draws[n]);
  }
  return out;
}

TraceSeries tv_predictive_trace(const Trajectory& traj,
                                std::span<const std::size_t> checkpoints) {
  return TvTrace(predictives_at(traj, checkpoints),
                 {checkpoints.begin(), checkpoints.end()});
}

TraceSeries tv_predictive_trace(const Trajectory& traj,
                                std::span<const std::size_t> checkpoints,
                                const Partition& partition) {
  RequireSameSpace(SpaceOf(traj), partition.space());
  std::vector<ProbabilityVector> projected;
  for (const auto& p : predictives_at(traj, checkpoints)) {
    projected.push_back(partition.push_forward(p));
  }
  return TvTrace(projected, {checkpoints.begin(), checkpoints.end()});
}

std::vector<std::size_t> project_labels(std::span<const std::size_t> draws,
                                        const Partition& partition) {
  std::vector<std::size_t> labels;
  labels.reserve(draws.size());
  for (std::size_t x : draws) labels.push_back(partition.block_of(x));
  return labels;
}

TraceSeries ps_tv_trace(std::span<const std::size_t> labels, double theta,
                        const ProbabilityVector& nu_pi,
                        std::span<const std::size_t> checkpoints) {
  // The identity kernel on the label space gives the Polya predictives.
  Trajectory traj;
  traj.spec = std::make_shared<UrnSpec>(theta, nu_pi,
                                        FiniteKernel::Identity(nu_pi.space()));
  traj.draws.assign(labels.begin(), labels.end());
  return tv_predictive_trace(traj, checkpoints);
}

TraceSeries empirical_vs_predictive(const Trajectory& traj,
                                    std::span<const std::size_t> checkpoints) {
  RequireCheckpoints(checkpoints, traj.draws.size(), 1);
  const auto p = predictives_at(traj, checkpoints);
  const std::size_t k = p.empty() ? 0 : p.front().size();
  std::vector<double> counts(k, 0.0);
  std::vector<double> tv;
  std::size_t n = 0;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (; n < checkpoints[c]; ++n) counts.at(traj.draws[n]) += 1.0;
    double l1 = 0.0;
    for (std::size_t y = 0; y < k; ++y) {
      l1 += std::abs(counts[y] / static_cast<double>(n) - p[c][y]);
    }
    tv.push_back(std::min(1.0, 0.5 * l1));
  }
  TraceSeries out({checkpoints.begin(), checkpoints.end()});
  out.add("tv", std::move(tv));
  return out;
}

TraceSeries empirical_vs_predictive(const Trajectory& traj) {
  std::vector<std::size_t> all(traj.draws.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i + 1;
  return empirical_vs_predictive(traj, all);
}

CheckReport martingale_increment_check(const UrnSpec& spec, std::size_t depth,
                                       double tol) {
  CheckReport r = check_cid(spec, depth, tol);
  r.name = "martingale_increment";
  return r;
}

CheckReport martingale_increment_check(const GeneralUrnSpec& spec,
                                       const std::vector<TestSet>& test_sets,
                                       std::size_t depth,
                                       std::size_t replicates,
                                       std::size_t inner, std::uint64_t seed) {
  if (depth == 0 || replicates < 2 || inner == 0 || test_sets.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "need depth >= 1, replicates >= 2, inner >= 1 and a test set");
  }
  const GeneralKernel& kernel = spec.kernel;
  const std::size_t sets = test_sets.size();
  // increments[s][n] holds one value per replicate.
  std::vector<std::vector<std::vector<double>>> increments(
      sets, std::vector<std::vector<double>>(depth));
  const double inner_n = static_cast<double>(inner);
  for (std::size_t r = 0; r < replicates; ++r) {
    const GeneralTrajectory traj = general_simulate(spec, depth, seed, r);
    // Estimator streams are disjoint from the simulation's steps 0..depth.
    const std::uint64_t est = derive_seed(seed, r, depth + 1);
    std::vector<double> nu_hat(sets, 0.0);
    for (std::size_t j = 0; j < inner; ++j) {
      const Point u = kernel.base_sampler(derive_seed(est, 0, j));
      for (std::size_t s = 0; s < sets; ++s) {
        nu_hat[s] += test_sets[s].contains(u) ? 1.0 : 0.0;
      }
    }
    for (double& v : nu_hat) v /= inner_n;
    // R^_{X_i}(A) = f(X_i) * fraction of conditional draws in A.
    std::vector<std::vector<double>> r_hat(sets, std::vector<double>(depth));
    for (std::size_t i = 0; i < depth; ++i) {
      std::vector<double> hits(sets, 0.0);
      if (traj.masses[i] > 0.0) {
        for (std::size_t j = 0; j < inner; ++j) {
          const Point y =
              kernel.conditional_sampler(traj.points[i],
                                         derive_seed(est, i + 1, j));
          for (std::size_t s = 0; s < sets; ++s) {
            hits[s] += test_sets[s].contains(y) ? 1.0 : 0.0;
          }
        }
      }
      for (std::size_t s = 0; s < sets; ++s) {
        r_hat[s][i] = traj.masses[i] * hits[s] / inner_n;
      }
    }
    for (std::size_t s = 0; s < sets; ++s) {
      double num = spec.theta * nu_hat[s];
      double den = spec.theta;
      double prev = num / den;
      for (std::size_t n = 0; n < depth; ++n) {
        num += r_hat[s][n];
        den += traj.masses[n];
        const double next = num / den;
        increments[s][n].push_back(next - prev);
        prev = next;
      }
    }
  }
  CheckReport report("martingale_increment", kStandardErrors);
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t s = 0; s < sets; ++s) {
    for (std::size_t n = 0; n < depth; ++n) {
      const McEstimate e = Summarize(increments[s][n]);
      const double z = StandardizedResidual(e, 0.0);
      report.observe(z, {{"set", test_sets[s].name},
                         {"step", n},
                         {"mean_increment", e.mean},
                         {"standard_error", e.standard_error}});
      table.push_back({{"set", test_sets[s].name},
                       {"step", n},
                       {"mean", e.mean},
                       {"standard_error", e.standard_error},
                       {"z", z}});
    }
  }
  report.details["replicates"] = static_cast<double>(replicates);
  report.details["inner"] = inner_n;
  report.details["depth"] = static_cast<double>(depth);
  report.data["increments"] = std::move(table);
  report.finalize();
  return report;
}

void write_report(std::ostream& os, const CheckReport& report) {
  os << report.to_json().dump(2) << '\n';
}

CheckReport read_report(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("unreadable report: ") + e.what());
  }
  return CheckReport::from_json(j);
}

}  // namespace mvps
