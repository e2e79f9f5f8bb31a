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

#include "mvps/general_kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mvps/error.hpp"
#include "mvps/rng.hpp"

namespace mvps {
namespace {

std::vector<TestSet> HalfLines() {
  return {HalfLine(-1.0), HalfLine(0.0), HalfLine(1.0)};
}

TEST(McKernelCheckTest, DeltaPasses) {
  const auto k = builtin::Delta(BaseMeasure::Normal(0, 1));
  const CheckReport r = mc_kernel_check(k, HalfLines(), 10000, 5);
  EXPECT_TRUE(r.passed) << r.to_json().dump();
  EXPECT_DOUBLE_EQ(r.tolerance, kStandardErrors);
}

TEST(McKernelCheckTest, SymmetrizedPasses) {
  const auto k = builtin::Symmetrized(BaseMeasure::Normal(0, 1));
  const CheckReport r = mc_kernel_check(k, HalfLines(), 100000, 17);
  EXPECT_TRUE(r.passed) << r.to_json().dump();
}

TEST(McKernelCheckTest, HistogramPasses) {
  const auto k = builtin::Histogram(BaseMeasure::Uniform(0, 1), {0.25, 0.5, 0.75});
  const std::vector<TestSet> sets = {HalfLine(0.1), HalfLine(0.6)};
  EXPECT_TRUE(mc_kernel_check(k, sets, 20000, 3).passed);
}

TEST(McKernelCheckTest, ShiftedFails) {
  // nu(A) = 0.5 and R_x(A) = Phi(-1) ~ 0.159 for A = (-inf, 0]: the
  // stationarity residual is ~0.34 with a standard error near 0.002.
  const auto k = builtin::Shifted(BaseMeasure::Normal(0, 1), 1.0);
  const std::vector<TestSet> sets = {HalfLine(0.0)};
  const CheckReport r = mc_kernel_check(k, sets, 100000, 9);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_residual, 10.0);
}

TEST(McKernelCheckTest, Preconditions) {
  const auto k = builtin::Delta(BaseMeasure::Normal(0, 1));
  EXPECT_THROW(mc_kernel_check(k, HalfLines(), 10, 1), Error);
  EXPECT_THROW(mc_kernel_check(k, {}, 1000, 1), Error);
}

TEST(GeneralKernelTest, ConditionalSamplersKeepTheAtom) {
  const auto sym = builtin::Symmetrized(BaseMeasure::Normal(0.5, 2), 0.5);
  const auto hist =
      builtin::Histogram(BaseMeasure::Normal(0, 1), {-1.0, 0.0, 2.0});
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const Point x = sym.base_sampler(derive_seed(1, s, 0));
    const Point y = sym.conditional_sampler(x, derive_seed(1, s, 1));
    EXPECT_NEAR(sym.atom_map(x), sym.atom_map(y), 1e-12);
    const Point u = hist.base_sampler(derive_seed(2, s, 0));
    const Point v = hist.conditional_sampler(u, derive_seed(2, s, 1));
    EXPECT_EQ(hist.atom_map(u), hist.atom_map(v));
  }
}

TEST(McEstimateTest, StandardizedResidual) {
  const McEstimate e = Summarize({1.0, 3.0});
  EXPECT_DOUBLE_EQ(e.mean, 2.0);
  EXPECT_DOUBLE_EQ(e.standard_error, 1.0);
  EXPECT_DOUBLE_EQ(StandardizedResidual(e, 0.0), 2.0);
  EXPECT_EQ(StandardizedResidual(Summarize({1.0, 1.0}), 1.0), 0.0);
}

}  // namespace
}  // namespace mvps
