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

#ifndef MVPS_DIAGNOSTICS_HPP_
#define MVPS_DIAGNOSTICS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mvps/check_report.hpp"
#include "mvps/general_kernel.hpp"
#include "mvps/kernel.hpp"
#include "mvps/urn.hpp"

namespace mvps {

// Named real series sharing one step axis. Insertion order is kept.
class TraceSeries {
 public:
  TraceSeries() = default;
  explicit TraceSeries(std::vector<std::size_t> steps)
      : steps_(std::move(steps)) {}

  const std::vector<std::size_t>& steps() const { return steps_; }
  std::size_t length() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }

  // Throws kInvalidArgument on a length mismatch or a repeated name.
  void add(std::string name, std::vector<double> values);
  bool has(const std::string& name) const;
  const std::vector<double>& at(const std::string& name) const;
  const std::vector<std::pair<std::string, std::vector<double>>>& series()
      const {
    return series_;
  }

  // "step,value" for one series.
  void write_csv(std::ostream& os, const std::string& name) const;
  // "step,<name1>,<name2>,..." for all series.
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
  static TraceSeries from_json(const nlohmann::json& j);

 private:
  std::vector<std::size_t> steps_;
  std::vector<std::pair<std::string, std::vector<double>>> series_;
};

// Predictive P_n for every n in `checkpoints`, replayed from the draws (or
// read from snapshots when the trajectory has no urn spec).
std::vector<ProbabilityVector> predictives_at(
    const Trajectory& traj, std::span<const std::size_t> checkpoints);

// Series "tv" = tv_distance(P_n, P_N) where N is the last checkpoint, plus
// "P(<label>)" per state. Checkpoints must be strictly increasing and at most
// the trajectory length.
TraceSeries tv_predictive_trace(const Trajectory& traj,
                                std::span<const std::size_t> checkpoints);

// Same trace on the sigma-algebra generated by `partition`: TV between the
// push-forwards of the predictives.
TraceSeries tv_predictive_trace(const Trajectory& traj,
                                std::span<const std::size_t> checkpoints,
                                const Partition& partition);

// Block labels pi(X_1), pi(X_2), ...
std::vector<std::size_t> project_labels(std::span<const std::size_t> draws,
                                        const Partition& partition);

// TV trace of the Polya-sequence predictives (theta nu_pi + counts)/(theta + n)
// of a label sequence.
TraceSeries ps_tv_trace(std::span<const std::size_t> labels, double theta,
                        const ProbabilityVector& nu_pi,
                        std::span<const std::size_t> checkpoints);

// Series "tv" = tv_distance(empirical_n, P_n). Checkpoints must be >= 1.
TraceSeries empirical_vs_predictive(const Trajectory& traj,
                                    std::span<const std::size_t> checkpoints);
// All checkpoints 1..N.
TraceSeries empirical_vs_predictive(const Trajectory& traj);

// Exact martingale check of the predictives; delegates to check_cid.
CheckReport martingale_increment_check(const UrnSpec& spec, std::size_t depth,
                                       double tol = kTol);

// Monte Carlo martingale check for a general-space urn. For each replicate a
// trajectory of length `depth` is drawn; nu(A) and every R_{X_i}(A) are
// estimated from `inner` conditional draws, and the increments
// P^_{n+1}(A) - P^_n(A) are averaged over replicates. Each (step, set) mean
// must lie within kStandardErrors standard errors of 0.
CheckReport martingale_increment_check(const GeneralUrnSpec& spec,
                                       const std::vector<TestSet>& test_sets,
                                       std::size_t depth,
                                       std::size_t replicates,
                                       std::size_t inner, std::uint64_t seed);

void write_report(std::ostream& os, const CheckReport& report);
CheckReport read_report(std::istream& is);

}  // namespace mvps

#endif  // MVPS_DIAGNOSTICS_HPP_
