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

#ifndef MVPS_URN_HPP_
#define MVPS_URN_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mvps/general_kernel.hpp"
#include "mvps/kernel.hpp"
#include "mvps/measure.hpp"

namespace mvps {

// Parameters (theta, nu, R) of a finite-space urn.
struct UrnSpec {
  UrnSpec(double theta, ProbabilityVector nu, FiniteKernel kernel);

  double theta;
  ProbabilityVector nu;
  FiniteKernel kernel;

  const FiniteSpace& space() const { return nu.space(); }
};

// FNV-1a hash of the spec's canonical text form, as 16 hex digits.
std::string spec_hash(const UrnSpec& spec);

// Urn contents after n draws: theta nu + accumulated, where accumulated is
// the sum of the rows R_{X_i} and total_added = sum f(X_i).
class UrnState {
 public:
  explicit UrnState(std::shared_ptr<const UrnSpec> spec);
  static UrnState Initial(const UrnSpec& spec);

  const UrnSpec& spec() const { return *spec_; }
  const std::shared_ptr<const UrnSpec>& spec_ptr() const { return spec_; }
  std::size_t n() const { return n_; }
  std::span<const double> accumulated() const { return accumulated_; }
  double total_added() const { return total_added_; }

  // In-place version of step().
  void advance(std::size_t x);
  // (theta nu + accumulated)(y) / (theta + total_added) without building a
  // ProbabilityVector.
  double predictive_at(std::size_t y) const;

 private:
  std::shared_ptr<const UrnSpec> spec_;
  std::size_t n_ = 0;
  std::vector<double> accumulated_;
  double total_added_ = 0.0;
};

// (theta nu + accumulated) / (theta + total_added).
ProbabilityVector predictive(const UrnState& state);
// Adds R_x; a null color x only advances n.
UrnState step(const UrnState& state, std::size_t x);
// State after replaying `history` from the empty urn.
UrnState replay(const UrnSpec& spec, std::span<const std::size_t> history);

struct Trajectory {
  // Null for trajectories of the q_n recursion, which has no urn spec.
  std::shared_ptr<const UrnSpec> spec;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::vector<std::size_t> draws;
  // snapshots[i] is the predictive after i draws (n + 1 entries) when
  // recorded, empty otherwise.
  std::vector<std::vector<double>> snapshots;
};

// Sequential sampling from the predictive. The generator is seeded with
// derive_seed(seed, replicate, 0).
Trajectory simulate(const UrnSpec& spec, std::size_t n, std::uint64_t seed,
                    std::uint64_t replicate = 0, bool record_snapshots = false);

struct GeneralUrnSpec {
  double theta;
  GeneralKernel kernel;
};

struct GeneralTrajectory {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::vector<Point> points;
  // Index of the particle a draw was reinforced from, -1 for base draws.
  std::vector<long> parents;
  std::vector<double> masses;
};

// Weighted-particle urn: with probability theta / (theta + D_n) draw from
// the base, otherwise pick particle i with probability f(X_i) / (theta + D_n)
// and draw from its conditional. Step i's user procedures receive
// derive_seed(seed, replicate, i + 1).
GeneralTrajectory general_simulate(const GeneralUrnSpec& spec, std::size_t n,
                                   std::uint64_t seed,
                                   std::uint64_t replicate = 0);

// q_n(n, X_1..X_n) in [0, 1].
using QSequence =
    std::function<double(std::size_t, std::span<const std::size_t>)>;

// q_n = (theta + n - 1) / (theta + n): the balanced urn.
QSequence BalancedQ(double theta);
QSequence ConstantQ(double q);

// Predictives P_0 = nu0, P_n = q_n P_{n-1} + (1 - q_n) R_{X_n} along a
// given path. Returns path.size() + 1 snapshots. Throws kBadQ for q outside
// [0, 1] and kInvalidArgument unless the kernel has unit-mass rows.
std::vector<std::vector<double>> cid_recursion_predictives(
    const ProbabilityVector& nu0, const FiniteKernel& kernel,
    const QSequence& q, std::span<const std::size_t> path);

// Samples X_{n+1} ~ P_n under the same recursion; snapshots are recorded.
Trajectory cid_recursion_simulate(const ProbabilityVector& nu0,
                                  const FiniteKernel& kernel,
                                  const QSequence& q, std::size_t n,
                                  std::uint64_t seed,
                                  std::uint64_t replicate = 0);

// Line-oriented trajectory format:
//   # mvps-trajectory 1
//   # spec_hash <hex>     ("none" for recursion trajectories)
//   # seed <seed>
//   # replicate <index>
//   # n <count>
//   <label>               one line per draw
void write_trajectory(std::ostream& os, const Trajectory& traj,
                      const FiniteSpace& space);
struct TrajectoryFile {
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::vector<std::size_t> draws;
};
TrajectoryFile read_trajectory(std::istream& is, const FiniteSpace& space);

// Hash of theta and the kernel name.
std::string spec_hash(const GeneralUrnSpec& spec);

// Same header; points printed with 17 significant digits, one per line.
void write_general_trajectory(std::ostream& os, const GeneralTrajectory& traj,
                              const GeneralUrnSpec& spec);

}  // namespace mvps

#endif  // MVPS_URN_HPP_
