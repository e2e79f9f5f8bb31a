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

#ifndef MVPS_GENERAL_KERNEL_HPP_
#define MVPS_GENERAL_KERNEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mvps/check_report.hpp"

namespace mvps {

// Points of a general (real-line) state space.
using Point = double;

// Reinforcement kernel on a general space, given through samplers.
//   base_sampler(seed)            draws from nu
//   mass_fn(x)                    f(x) = R_x(X) >= 0
//   conditional_sampler(x, seed)  draws from R_x / f(x)
//   atom_map(x)                   optional label of the atom containing x
// Procedures may be invoked concurrently with distinct seeds.
struct GeneralKernel {
  std::string name;
  std::function<Point(std::uint64_t)> base_sampler;
  std::function<double(Point)> mass_fn;
  std::function<Point(Point, std::uint64_t)> conditional_sampler;
  std::function<double(Point)> atom_map;
};

// Base measures used by the built-in kernels.
struct BaseMeasure {
  enum class Kind { kNormal, kUniform };
  Kind kind = Kind::kNormal;
  double a = 0.0;  // mean, or lower end
  double b = 1.0;  // standard deviation, or upper end

  static BaseMeasure Normal(double mean, double sd) {
    return {Kind::kNormal, mean, sd};
  }
  static BaseMeasure Uniform(double lo, double hi) {
    return {Kind::kUniform, lo, hi};
  }
  Point sample(std::uint64_t seed) const;
  std::string describe() const;
};

namespace builtin {

// R_x = delta_x: Blackwell-MacQueen sampling.
GeneralKernel Delta(BaseMeasure base);
// R_x = (delta_x + delta_{2c - x}) / 2 with atom map |x - c|. nu should be
// symmetric about c.
GeneralKernel Symmetrized(BaseMeasure base, double center = 0.0);
// R_x = nu(. | D_k) for the bin D_k containing x. Bins are
// (-inf, e_0), [e_0, e_1), ..., [e_last, inf); atom map = bin index.
GeneralKernel Histogram(BaseMeasure base, std::vector<double> edges);
// R_x = nu shifted by `shift`, independent of x. Not stationary unless
// shift = 0.
GeneralKernel Shifted(BaseMeasure base, double shift);

}  // namespace builtin

struct TestSet {
  std::string name;
  std::function<bool(Point)> contains;
};

// (-inf, t]
TestSet HalfLine(double t);

// Monte Carlo version of the stationarity and self-averaging conditions.
// For each test set A:
//   stationarity:   E_{x~nu}[f(x) R^_x(A)] - E[f] nu(A), estimated from
//                   paired draws d = f(x) 1{y in A} - f(x') 1{x in A}
//                   with y ~ R^_x and x' ~ nu independent;
//   self-averaging: E_{x~nu}[h(x)^2] where
//                   h(x) = E_{y~R^_x}[f(y) R^_y(A)] - c R^_x(A), estimated
//                   unbiasedly from two independent inner replicates.
// A residual passes when |mean| <= 4 standard errors. Requires N >= 100.
CheckReport mc_kernel_check(const GeneralKernel& kernel,
                            const std::vector<TestSet>& test_sets,
                            std::size_t samples, std::uint64_t seed);

// Standard errors allowed for every statistical comparison.
inline constexpr double kStandardErrors = 4.0;

// Statistical comparison helper: |estimate - target| <= k * se.
struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};
McEstimate Summarize(const std::vector<double>& values);
// |mean - target| / se; 0 when both the deviation and se vanish.
double StandardizedResidual(const McEstimate& e, double target);

}  // namespace mvps

#endif  // MVPS_GENERAL_KERNEL_HPP_
