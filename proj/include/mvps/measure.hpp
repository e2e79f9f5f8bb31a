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

#ifndef MVPS_MEASURE_HPP_
#define MVPS_MEASURE_HPP_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mvps {

// Ordered set of distinct state labels. States are addressed by index
// internally; labels only appear at external interfaces. Copies share the
// label table.
class FiniteSpace {
 public:
  explicit FiniteSpace(std::vector<std::string> labels);

  // Space with labels "1".."k".
  static FiniteSpace Numbered(std::size_t k);

  std::size_t size() const { return impl_->labels.size(); }
  const std::string& label(std::size_t i) const { return impl_->labels.at(i); }
  const std::vector<std::string>& labels() const { return impl_->labels; }

  // Throws kInvalidArgument for unknown labels.
  std::size_t index_of(std::string_view label) const;
  bool contains(std::string_view label) const;

  friend bool operator==(const FiniteSpace& a, const FiniteSpace& b);

 private:
  struct Impl {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> index;
  };
  std::shared_ptr<const Impl> impl_;
};

void RequireSameSpace(const FiniteSpace& a, const FiniteSpace& b);

// Non-negative weight vector over a finite space.
class FiniteMeasure {
 public:
  FiniteMeasure(FiniteSpace space, std::vector<double> weights);

  static FiniteMeasure Zero(FiniteSpace space);

  const FiniteSpace& space() const { return space_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  double total() const;
  // Mass of a set of states.
  double mass_of(std::span<const std::size_t> states) const;

 private:
  FiniteSpace space_;
  std::vector<double> weights_;
};

// FiniteMeasure whose total mass is 1 within kTol.
class ProbabilityVector {
 public:
  // Throws kInvalidArgument unless the weights are a probability vector.
  ProbabilityVector(FiniteSpace space, std::vector<double> weights);

  static ProbabilityVector Uniform(FiniteSpace space);
  static ProbabilityVector Point(FiniteSpace space, std::size_t state);

  const FiniteSpace& space() const { return measure_.space(); }
  std::span<const double> weights() const { return measure_.weights(); }
  std::size_t size() const { return measure_.size(); }
  double operator[](std::size_t i) const { return measure_[i]; }
  double mass_of(std::span<const std::size_t> states) const {
    return measure_.mass_of(states);
  }
  const FiniteMeasure& measure() const { return measure_; }

 private:
  struct Unchecked {};
  ProbabilityVector(Unchecked, FiniteMeasure m) : measure_(std::move(m)) {}
  friend ProbabilityVector normalize(const FiniteMeasure& m);

  FiniteMeasure measure_;
};

// weights / total mass. Throws kZeroMass when the total is zero.
ProbabilityVector normalize(const FiniteMeasure& m);

// sup_A |p(A) - q(A)|, i.e. half the L1 distance.
double tv_distance(const ProbabilityVector& p, const ProbabilityVector& q);

// Convex combination. Coefficients must be non-negative and sum to 1.
ProbabilityVector mix(std::span<const double> coeffs,
                      std::span<const ProbabilityVector> measures);

// E[P(a) P(b)] for P ~ DP(theta, nu):
// (theta nu(a) nu(b) + nu(a) [a == b]) / (theta + 1).
double dp_product_moment(double theta, const ProbabilityVector& nu,
                         std::size_t a, std::size_t b);

// nu restricted to `states` and renormalized. Throws kZeroMass when
// nu(states) = 0.
ProbabilityVector conditional(const ProbabilityVector& nu,
                              std::span<const std::size_t> states);

}  // namespace mvps

#endif  // MVPS_MEASURE_HPP_
