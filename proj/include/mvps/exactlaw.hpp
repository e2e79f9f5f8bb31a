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

#ifndef MVPS_EXACTLAW_HPP_
#define MVPS_EXACTLAW_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"
#include "mvps/check_report.hpp"
#include "mvps/kernel.hpp"
#include "mvps/urn.hpp"

namespace mvps {

// Largest number of tuples any enumeration may visit.
inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

// k^n, throwing kTooLarge above kEnumerationCap.
std::uint64_t CheckedTupleCount(std::size_t k, std::size_t n);

// Law of (X_1, ..., X_n) on a finite space. Tuples are indexed in
// mixed radix with X_1 most significant.
class JointLaw {
 public:
  JointLaw(FiniteSpace space, std::size_t depth, std::vector<double> table);

  const FiniteSpace& space() const { return space_; }
  std::size_t depth() const { return depth_; }
  std::size_t size() const { return table_.size(); }
  std::span<const double> table() const { return table_; }
  double operator[](std::size_t index) const { return table_[index]; }

  std::vector<std::size_t> tuple(std::size_t index) const;
  std::size_t index_of(std::span<const std::size_t> tuple) const;
  double probability(std::span<const std::size_t> tuple) const {
    return table_[index_of(tuple)];
  }
  // Law of (X_1, ..., X_{n-1}).
  JointLaw drop_last() const;

  // "tuple,probability" rows; tuple labels joined by spaces.
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;

 private:
  FiniteSpace space_;
  std::size_t depth_;
  std::vector<double> table_;
};

// table[x_1..x_n] = prod_i predictive(x_1..x_{i-1})(x_i), by depth-first
// enumeration.
JointLaw joint_law(const UrnSpec& spec, std::size_t n);

// Permutation invariance of joint_law(spec, n) (plus two-step predictive
// symmetry at every history of length <= n - 2). Requires n >= 2.
CheckReport check_exchangeable(const UrnSpec& spec, std::size_t n,
                               double tol = kTol);

// One-step martingale identity
//   sum_x P_h(x) P_{h+x}(y) = P_h(y)
// for every positive-probability history h with |h| < depth and every y.
CheckReport check_cid(const UrnSpec& spec, std::size_t depth,
                      double tol = kTol);

// Finite c.i.d. structure: (i) decompose_blocks passes; (ii) for every block
// B_j and mass value a, nu(f = a | B_j) = nu(f = a). Requires Z empty and
// nu > 0 (kHypothesisViolated otherwise).
CheckReport check_cid_structure(const FiniteKernel& kernel,
                                const ProbabilityVector& nu);

// Blackwell-MacQueen tuple probability
//   prod_i (theta nu(x_i) + #{j < i : x_j = x_i}) / (theta + i - 1).
double ps_joint_law(double theta, const ProbabilityVector& nu,
                    std::span<const std::size_t> labels);

struct Projection {
  JointLaw label_law;
  CheckReport report;
};

// Push-forward of joint_law(spec, n) through the block map, compared tuple
// by tuple with the Polya sequence law PS(theta, nu_pi).
Projection project_atoms_law(const UrnSpec& spec, const Partition& partition,
                             std::size_t n);
// Same projection compared against an arbitrary reference urn on the block
// space (e.g. null_projection_spec).
Projection project_atoms_law(const UrnSpec& spec, const Partition& partition,
                             std::size_t n, const UrnSpec& reference);

// Urn on the block space with parameters (theta, nu_pi, R_pi) where
//   (R_pi)_p = nu(Z^c) delta_p + nu(Z) nu_pi(. | pi(Z))  for p in pi(Z^c),
//   (R_pi)_p = 0                                          for p in pi(Z).
// Blocks must not straddle Z.
UrnSpec null_projection_spec(double theta, const ProbabilityVector& nu,
                             const Partition& partition,
                             std::span<const std::size_t> null_set);

}  // namespace mvps

#endif  // MVPS_EXACTLAW_HPP_
