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

// Specs shared by several test files.

#ifndef MVPS_TESTS_SUPPORT_FIXTURES_HPP_
#define MVPS_TESTS_SUPPORT_FIXTURES_HPP_

#include <string>
#include <vector>

#include "mvps/kernel.hpp"
#include "mvps/measure.hpp"
#include "mvps/urn.hpp"

namespace mvps::fixtures {

inline FiniteSpace Labels(std::size_t k) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= k; ++i) labels.push_back(std::to_string(i));
  return FiniteSpace(labels);
}

// Four-colour c.i.d. urn that is not exchangeable: rows of mass 0.5 on odd
// states and 1 on even states, nu = (nu1, nu2, nu1, nu2).
inline ProbabilityVector UnbalancedNu(double nu1 = 0.2, double nu2 = 0.3) {
  return ProbabilityVector(Labels(4), {nu1, nu2, nu1, nu2});
}

inline FiniteKernel UnbalancedKernel(double nu1 = 0.2, double nu2 = 0.3) {
  return FiniteKernel(Labels(4), {{nu1, nu2, 0, 0},
                                  {2 * nu1, 2 * nu2, 0, 0},
                                  {0, 0, nu1, nu2},
                                  {0, 0, 2 * nu1, 2 * nu2}});
}

inline UrnSpec UnbalancedSpec() {
  return UrnSpec(1.0, UnbalancedNu(), UnbalancedKernel());
}

// Two-colour Polya sequence with uniform base.
inline UrnSpec PolyaSpec(double theta = 1.0, std::size_t k = 2) {
  const ProbabilityVector nu = ProbabilityVector::Uniform(FiniteSpace::Numbered(k));
  return UrnSpec(theta, nu, FiniteKernel::Identity(nu.space()));
}

inline ProbabilityVector Nu3() {
  return ProbabilityVector(Labels(3), {0.25, 0.25, 0.5});
}

// Blocks {1,2}, {3}.
inline Partition Blocks3() { return Partition(Labels(3), {{0, 1}, {2}}); }

inline UrnSpec BlockSpec3() {
  return UrnSpec(1.0, Nu3(),
                 exchangeable_kernel_from_partition(Nu3(), Blocks3()));
}

// Singletons with Z = {3}.
inline UrnSpec NullSpec3() {
  const std::vector<std::size_t> z = {2};
  return UrnSpec(1.0, Nu3(),
                 exchangeable_kernel_from_partition(
                     Nu3(), Partition::Singletons(Labels(3)), z));
}

}  // namespace mvps::fixtures

#endif  // MVPS_TESTS_SUPPORT_FIXTURES_HPP_
