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

#include "mvps/measure.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "mvps/error.hpp"

namespace mvps {

FiniteSpace::FiniteSpace(std::vector<std::string> labels) {
  if (labels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "finite space needs >= 1 label");
  }
  auto impl = std::make_shared<Impl>();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!impl->index.emplace(labels[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate state label '" + labels[i] + "'");
    }
  }
  impl->labels = std::move(labels);
  impl_ = std::move(impl);
}

FiniteSpace FiniteSpace::Numbered(std::size_t k) {
  std::vector<std::string> labels;
  labels.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) labels.push_back(std::to_string(i));
  return FiniteSpace(std::move(labels));
}

std::size_t FiniteSpace::index_of(std::string_view label) const {
  auto it = impl_->index.find(std::string(label));
  if (it == impl_->index.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown state label '" + std::string(label) + "'");
  }
  return it->second;
}

bool FiniteSpace::contains(std::string_view label) const {
  return impl_->index.count(std::string(label)) > 0;
}

bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
  return a.impl_ == b.impl_ || a.impl_->labels == b.impl_->labels;
}

void RequireSameSpace(const FiniteSpace& a, const FiniteSpace& b) {
  if (!(a == b)) {
    throw Error(ErrorCode::kSpaceMismatch, "measures live on different spaces");
  }
}

FiniteMeasure::FiniteMeasure(FiniteSpace space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (weights_.size() != space_.size()) {
    throw Error(ErrorCode::kSpaceMismatch,
                "weight vector length does not match the space");
  }
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "measure weights must be finite and non-negative");
    }
  }
}

FiniteMeasure FiniteMeasure::Zero(FiniteSpace space) {
  const std::size_t k = space.size();
  return FiniteMeasure(std::move(space), std::vector<double>(k, 0.0));
}

double FiniteMeasure::total() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double FiniteMeasure::mass_of(std::span<const std::size_t> states) const {
  double s = 0.0;
  for (std::size_t x : states) s += weights_.at(x);
  return s;
}

ProbabilityVector::ProbabilityVector(FiniteSpace space,
                                     std::vector<double> weights)
    : measure_(std::move(space), std::move(weights)) {
  if (std::abs(measure_.total() - 1.0) > kTol) {
    throw Error(ErrorCode::kInvalidArgument,
                "probability vector must sum to 1 within 1e-12");
  }
}

ProbabilityVector ProbabilityVector::Uniform(FiniteSpace space) {
  const std::size_t k = space.size();
  return ProbabilityVector(std::move(space),
                           std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

ProbabilityVector ProbabilityVector::Point(FiniteSpace space,
                                           std::size_t state) {
  std::vector<double> w(space.size(), 0.0);
  w.at(state) = 1.0;
  return ProbabilityVector(std::move(space), std::move(w));
}

ProbabilityVector normalize(const FiniteMeasure& m) {
  const double total = m.total();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kZeroMass, "cannot normalize a zero measure");
  }
  std::vector<double> w(m.weights().begin(), m.weights().end());
  // Already-normalized input (up to summation rounding) is returned as is so
  // that normalize is an exact fixed point.
  const double slack =
      4.0 * static_cast<double>(w.size()) * std::numeric_limits<double>::epsilon();
  if (std::abs(total - 1.0) > slack) {
    for (double& v : w) v /= total;
  }
  return ProbabilityVector(ProbabilityVector::Unchecked{},
                           FiniteMeasure(m.space(), std::move(w)));
}

double tv_distance(const ProbabilityVector& p, const ProbabilityVector& q) {
  RequireSameSpace(p.space(), q.space());
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * l1);
}

ProbabilityVector mix(std::span<const double> coeffs,
                      std::span<const ProbabilityVector> measures) {
  if (coeffs.size() != measures.size() || measures.empty()) {
    throw Error(ErrorCode::kBadCoefficients,
                "mix needs one coefficient per measure");
  }
  double sum = 0.0;
  for (double c : coeffs) {
    if (!(c >= 0.0)) {
      throw Error(ErrorCode::kBadCoefficients, "negative mixing coefficient");
    }
    sum += c;
  }
  if (std::abs(sum - 1.0) > kTol) {
    throw Error(ErrorCode::kBadCoefficients,
                "mixing coefficients must sum to 1");
  }
  const FiniteSpace& space = measures.front().space();
  std::vector<double> w(space.size(), 0.0);
  for (std::size_t j = 0; j < measures.size(); ++j) {
    RequireSameSpace(space, measures[j].space());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += coeffs[j] * measures[j][i];
  }
  return ProbabilityVector(space, std::move(w));
}

double dp_product_moment(double theta, const ProbabilityVector& nu,
                         std::size_t a, std::size_t b) {
  if (!(theta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must be positive");
  }
  if (a >= nu.size() || b >= nu.size()) {
    throw Error(ErrorCode::kInvalidArgument, "state out of range");
  }
  const double diag = (a == b) ? nu[a] : 0.0;
  return (theta * nu[a] * nu[b] + diag) / (theta + 1.0);
}

ProbabilityVector conditional(const ProbabilityVector& nu,
                              std::span<const std::size_t> states) {
  std::vector<double> w(nu.size(), 0.0);
  for (std::size_t x : states) w.at(x) = nu[x];
  return normalize(FiniteMeasure(nu.space(), std::move(w)));
}

}  // namespace mvps
