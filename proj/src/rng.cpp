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

#include "mvps/rng.hpp"

#include <cmath>
#include <numeric>

namespace mvps {
namespace {

std::uint64_t SplitMix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                          std::uint64_t step) {
  std::uint64_t h = SplitMix(master ^ 0x6a09e667f3bcc909ULL);
  h = SplitMix(h ^ (replicate * 0x9e3779b97f4a7c15ULL));
  h = SplitMix(h ^ (step * 0xbf58476d1ce4e5b9ULL));
  return h;
}

double Rng::uniform() {
  // 53 random bits -> [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double sd) {
  std::normal_distribution<double> dist(mean, sd);
  return dist(engine_);
}

double Rng::beta_one(double theta) {
  const double u = uniform();
  return 1.0 - std::pow(1.0 - u, 1.0 / theta);
}

std::size_t Rng::categorical(std::span<const double> weights, double total) {
  const double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  // Rounding can leave target just above the accumulated sum.
  return last_positive;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  return categorical(weights,
                     std::accumulate(weights.begin(), weights.end(), 0.0));
}

}  // namespace mvps
