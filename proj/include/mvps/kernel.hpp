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

#ifndef MVPS_KERNEL_HPP_
#define MVPS_KERNEL_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvps/check_report.hpp"
#include "mvps/measure.hpp"

namespace mvps {

// Disjoint non-empty blocks covering a finite space. Blocks are stored in
// canonical order (by smallest member, members ascending), so two partitions
// with the same blocks compare equal.
class Partition {
 public:
  Partition(FiniteSpace space, std::vector<std::vector<std::size_t>> blocks);
  static Partition FromBlockOf(FiniteSpace space,
                               std::span<const std::size_t> block_of);
  static Partition Singletons(FiniteSpace space);
  static Partition OneBlock(FiniteSpace space);

  const FiniteSpace& space() const { return space_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  const std::vector<std::size_t>& block(std::size_t j) const {
    return blocks_.at(j);
  }
  const std::vector<std::vector<std::size_t>>& blocks() const {
    return blocks_;
  }
  std::size_t block_of(std::size_t x) const { return block_of_.at(x); }

  // Member labels joined by '+', e.g. "1+2".
  std::string block_label(std::size_t j) const;
  std::vector<std::vector<std::string>> block_labels() const;
  // Space whose states are the blocks.
  FiniteSpace block_space() const;
  // nu_pi: push-forward of nu onto block_space().
  ProbabilityVector push_forward(const ProbabilityVector& nu) const;

  friend bool operator==(const Partition& a, const Partition& b);

 private:
  FiniteSpace space_;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_;
};

// Reinforcement kernel on a finite space: row x is the measure R_x.
// Entries are non-negative; raw matrices with negative entries are rejected
// with kNegativeEntries and should be inspected with detect_negative.
class FiniteKernel {
 public:
  FiniteKernel(FiniteSpace space, std::vector<double> row_major);
  FiniteKernel(FiniteSpace space, const std::vector<std::vector<double>>& rows);

  static FiniteKernel Identity(FiniteSpace space);
  // Every row equals nu (the i.i.d. kernel).
  static FiniteKernel Constant(const ProbabilityVector& nu);

  const FiniteSpace& space() const { return space_; }
  std::size_t size() const { return space_.size(); }
  std::span<const double> row(std::size_t x) const {
    return {entries_.data() + x * size(), size()};
  }
  double operator()(std::size_t x, std::size_t y) const {
    return entries_[x * size() + y];
  }
  std::span<const double> entries() const { return entries_; }
  FiniteMeasure row_measure(std::size_t x) const;

  // f(x) = R_x(X).
  double mass(std::size_t x) const { return masses_[x]; }
  std::span<const double> masses() const { return masses_; }
  // f(x) <= kTol.
  bool is_null(std::size_t x) const { return masses_[x] <= kTol; }
  // Z = {x : f(x) = 0}.
  std::vector<std::size_t> null_set() const;
  // Every row has mass 1 or 0 within kTol.
  bool is_canonical() const;

 private:
  void Init();

  FiniteSpace space_;
  std::vector<double> entries_;
  std::vector<double> masses_;
};

// Passes iff every entry is >= -kTol. Witness: most negative (x, y) entry.
CheckReport detect_negative(const FiniteSpace& space,
                            std::span<const double> row_major);

// Passes iff f is constant over {x in Z^c : nu(x) > 0}; details["m"] holds
// the constant on success. Throws kEmptyPositivePart when nu(Z^c) = 0.
CheckReport check_balanced(const FiniteKernel& kernel,
                           const ProbabilityVector& nu);

// Rows with positive mass scaled to mass 1; null rows stay zero.
FiniteKernel canonicalize(const FiniteKernel& kernel);

// nu R = c nu with c = nu(f), componentwise.
CheckReport check_scaled_stationarity(const FiniteKernel& kernel,
                                      const ProbabilityVector& nu);
// nu R (B) = c nu(B) for every block B of `blocks` (stationarity on the
// sigma-algebra generated by the partition).
CheckReport check_scaled_stationarity_on_blocks(const FiniteKernel& kernel,
                                                const ProbabilityVector& nu,
                                                const Partition& blocks);
// (R R)_x = c R_x for every x with nu(x) > 0.
CheckReport check_self_averaging(const FiniteKernel& kernel,
                                 const ProbabilityVector& nu);

// Atoms of sigma(R): states whose canonical rows coincide within kTol.
// Null states form one block.
Partition atoms_of_kernel(const FiniteKernel& kernel);

// Canonical row x puts mass 1 on its own block, for every x with nu(x) > 0
// and f(x) > 0.
CheckReport check_proper(const FiniteKernel& kernel,
                         const ProbabilityVector& nu,
                         const Partition& partition);

struct Decomposition {
  CheckReport report;
  // Present when the decomposition succeeded. Covers the whole space; the
  // null set, when non-empty, is one extra block flagged by `null_block`.
  std::optional<Partition> partition;
  std::optional<std::size_t> null_block;
};

// Closed communicating classes of the canonical kernel on Z^c, each checked
// to have identical rows equal to nu(Z^c) nu(. | class) + nu(Z) nu(. | Z)
// (which is nu(. | class) when Z is empty). Requires nu(x) > 0 everywhere;
// throws kPositiveSupportRequired otherwise.
Decomposition decompose_blocks(const FiniteKernel& kernel,
                               const ProbabilityVector& nu);

// Row x = nu(Z^c) nu(. | block_of(x)) + nu(Z) nu(. | Z) for x outside Z and
// zero rows on Z. Throws kBadPartition for zero-mass blocks on Z^c or blocks
// straddling Z, kBadNullSet when nu(Z) = 1.
FiniteKernel exchangeable_kernel_from_partition(
    const ProbabilityVector& nu, const Partition& partition,
    std::span<const std::size_t> null_set = {});

}  // namespace mvps

#endif  // MVPS_KERNEL_HPP_
