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

#ifndef MVPS_PRIOR_HPP_
#define MVPS_PRIOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvps/general_kernel.hpp"
#include "mvps/kernel.hpp"
#include "mvps/measure.hpp"

namespace mvps {

struct Truncation {
  std::size_t levels = 1;
  // E[prod_{i <= J} (1 - W_i)] = (theta / (theta + 1))^J.
  double expected_residual = 1.0;
};

// Smallest J >= 1 with (theta / (theta + 1))^J <= epsilon.
Truncation truncation_level(double theta, double epsilon);

inline constexpr double kDefaultTruncationEpsilon = 1e-8;

// Truncated Sethuraman draw: W_j ~ Beta(1, theta),
// V_1 = W_1, V_j = W_j prod_{i<j} (1 - W_i), residual = prod_{i<=J} (1 - W_i).
template <class Atom>
struct StickBreakingDraw {
  double theta = 1.0;
  std::vector<double> sticks;
  std::vector<double> weights;
  std::vector<Atom> atoms;
  double residual = 1.0;
};

using FiniteStickBreaking = StickBreakingDraw<std::size_t>;
using GeneralStickBreaking = StickBreakingDraw<Point>;

// Atoms i.i.d. nu. The stream is seeded with derive_seed(seed, replicate, 0).
FiniteStickBreaking sample_dp(double theta, const ProbabilityVector& nu,
                              std::size_t levels, std::uint64_t seed,
                              std::uint64_t replicate = 0);
GeneralStickBreaking sample_dp(double theta,
                               const std::function<Point(std::uint64_t)>& base,
                               std::size_t levels, std::uint64_t seed,
                               std::uint64_t replicate = 0);

enum class ResidualMode {
  kReassignToBase,  // residual mass goes to nu; result is a probability
  kKeep,            // total mass is 1 - residual
};

// One realization of a random measure on a finite space.
struct RandomMeasureDraw {
  FiniteMeasure measure;
  double residual = 0.0;
  bool residual_reassigned = false;
  FiniteStickBreaking sticks;
};

// sum_j V_j delta_{U_j} (+ residual nu).
RandomMeasureDraw realize_dp(const FiniteStickBreaking& draw,
                             const ProbabilityVector& nu, ResidualMode mode);

// P = sum_j V_j R_{U_j} (+ residual nu), with a canonical kernel and
// nu(Z) = 0 (kHypothesisViolated otherwise).
RandomMeasureDraw sample_kernel_sb(double theta, const ProbabilityVector& nu,
                                   const FiniteKernel& kernel,
                                   std::size_t levels, std::uint64_t seed,
                                   std::uint64_t replicate = 0,
                                   ResidualMode mode =
                                       ResidualMode::kReassignToBase);

// General-space kernel stick-breaking: particles (U_j, V_j), each standing
// for the kernel row R_{U_j} of `kernel_name`.
struct KernelParticleDraw {
  std::string kernel_name;
  GeneralStickBreaking sticks;
};
KernelParticleDraw sample_kernel_sb(double theta, const GeneralKernel& kernel,
                                    std::size_t levels, std::uint64_t seed,
                                    std::uint64_t replicate = 0);

// Kernel stick-breaking with parameters
// (theta + n, (theta nu + sum_i R_{data_i}) / (theta + n)).
// Empty data reproduces the prior draw for the same seed.
RandomMeasureDraw sample_posterior(double theta, const ProbabilityVector& nu,
                                   const FiniteKernel& kernel,
                                   std::span<const std::size_t> data,
                                   std::size_t levels, std::uint64_t seed,
                                   std::uint64_t replicate = 0,
                                   ResidualMode mode =
                                       ResidualMode::kReassignToBase);

// Base measure of the posterior sampler: normalize(theta nu + sum R_{x_i}).
ProbabilityVector posterior_base(double theta, const ProbabilityVector& nu,
                                 const FiniteKernel& kernel,
                                 std::span<const std::size_t> data);

inline constexpr std::size_t kNoBlock = std::numeric_limits<std::size_t>::max();

struct HierarchicalSample {
  FiniteStickBreaking q_sticks;  // atoms are block indices
  std::vector<double> q;         // Q over blocks, residual reassigned to nu_pi
  std::vector<std::size_t> labels;   // p_i
  std::vector<std::size_t> samples;  // X_i
};

// Q ~ DP(theta, nu_pi); p_i | Q i.i.d. Q; X_i ~ nu(. | block p_i).
class HierarchicalSampler {
 public:
  HierarchicalSampler(double theta, ProbabilityVector nu, Partition partition);

  HierarchicalSample draw(std::size_t n, std::size_t levels,
                          std::uint64_t seed, std::uint64_t replicate = 0) const;

  const Partition& partition() const { return partition_; }
  const ProbabilityVector& nu_pi() const { return nu_pi_; }

 private:
  double theta_;
  ProbabilityVector nu_;
  Partition partition_;
  ProbabilityVector nu_pi_;
  std::vector<std::vector<double>> within_;  // nu(. | block) over members
};

HierarchicalSample sample_hierarchical(double theta,
                                       const ProbabilityVector& nu,
                                       const Partition& partition,
                                       std::size_t n, std::size_t levels,
                                       std::uint64_t seed,
                                       std::uint64_t replicate = 0);

struct NullMixtureSample {
  FiniteStickBreaking q_sticks;  // atoms index live_blocks
  std::vector<double> q;         // Q over live_blocks
  std::vector<std::size_t> live_blocks;  // partition blocks inside Z^c
  std::vector<std::size_t> labels;  // partition block index, kNoBlock if xi=0
  std::vector<bool> xi;
  std::vector<std::size_t> samples;
};

// Q ~ DP(theta, nu_pi(. | pi(Z^c))); (p_i, xi_i) i.i.d. Q x Ber(nu(Z^c));
// X_i ~ nu(. | block p_i) if xi_i = 1, else nu(. | Z).
class NullMixtureSampler {
 public:
  NullMixtureSampler(double theta, ProbabilityVector nu, Partition partition,
                     std::vector<std::size_t> null_set);

  NullMixtureSample draw(std::size_t n, std::size_t levels, std::uint64_t seed,
                         std::uint64_t replicate = 0) const;

  double live_mass() const { return live_mass_; }

 private:
  double theta_;
  ProbabilityVector nu_;
  Partition partition_;
  std::vector<std::size_t> null_set_;
  std::vector<std::size_t> live_blocks_;
  std::vector<double> live_block_mass_;  // nu_pi(. | pi(Z^c))
  std::vector<std::vector<double>> within_;
  std::vector<double> within_null_;
  double live_mass_ = 1.0;
};

// Truncation from truncation_level(theta, 1e-8).
NullMixtureSample sample_null_mixture(double theta,
                                      const ProbabilityVector& nu,
                                      const Partition& partition,
                                      std::span<const std::size_t> null_set,
                                      std::size_t n, std::uint64_t seed,
                                      std::uint64_t replicate = 0);

// {"theta", "sticks", "weights", "atoms", "residual"} with atom labels.
nlohmann::json to_json(const FiniteStickBreaking& draw,
                       const FiniteSpace& atom_space);
nlohmann::json to_json(const GeneralStickBreaking& draw);

}  // namespace mvps

#endif  // MVPS_PRIOR_HPP_
