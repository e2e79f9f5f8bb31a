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

#ifndef MVPS_RNG_HPP_
#define MVPS_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace mvps {

// Child seed for (master, replicate, step):
//   h = mix(master ^ 0x6a09e667f3bcc909)
//   h = mix(h ^ (replicate * 0x9e3779b97f4a7c15))
//   h = mix(h ^ (step * 0xbf58476d1ce4e5b9))
// where mix is the splitmix64 finalizer. Replicates and steps never share
// generator state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                          std::uint64_t step);

// Seeded stream used by every sampler. Deterministic for a given seed within
// this implementation; no cross-platform bit-compatibility is promised.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform();
  double normal(double mean = 0.0, double sd = 1.0);
  // Beta(1, theta) by inverse transform: 1 - (1 - u)^(1 / theta).
  double beta_one(double theta);
  bool bernoulli(double p) { return uniform() < p; }
  // Index i with probability weights[i] / total. `total` must equal the sum.
  std::size_t categorical(std::span<const double> weights, double total);
  std::size_t categorical(std::span<const double> weights);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mvps

#endif  // MVPS_RNG_HPP_
