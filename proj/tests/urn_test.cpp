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

#include "mvps/urn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "mvps/error.hpp"
#include "mvps/exactlaw.hpp"
#include "mvps/rng.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

namespace mvps {
namespace {

using fixtures::Labels;

std::vector<double> Values(const ProbabilityVector& p) {
  return {p.weights().begin(), p.weights().end()};
}

TEST(PredictiveTest, EmptyHistoryIsNu) {
  const auto spec = fixtures::UnbalancedSpec();
  const auto p = predictive(UrnState::Initial(spec));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(p[i], spec.nu[i]);
}

TEST(PredictiveTest, UnbalancedAfterFirstState) {
  const auto spec = fixtures::UnbalancedSpec();
  const auto p = predictive(step(UrnState::Initial(spec), 0));
  const std::vector<double> expected = {0.26667, 0.4, 0.13333, 0.2};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(p[i], expected[i], 1e-5);
}

TEST(PredictiveTest, PolyaAfterFirstState) {
  const auto p = predictive(step(UrnState::Initial(fixtures::PolyaSpec()), 0));
  EXPECT_DOUBLE_EQ(p[0], 0.75);
  EXPECT_DOUBLE_EQ(p[1], 0.25);
}

TEST(StepTest, Reinforcement) {
  const auto ps = UrnState::Initial(fixtures::PolyaSpec());
  const auto s1 = step(ps, 1);
  EXPECT_EQ(s1.accumulated()[1], 1.0);
  EXPECT_EQ(s1.total_added(), 1.0);
  EXPECT_EQ(s1.n(), 1u);

  const auto ex = UrnState::Initial(fixtures::UnbalancedSpec());
  EXPECT_DOUBLE_EQ(step(ex, 1).total_added(), 1.0);
  EXPECT_DOUBLE_EQ(step(ex, 0).total_added(), 0.5);

  const auto null = UrnState::Initial(fixtures::NullSpec3());
  const auto z = step(null, 2);
  EXPECT_EQ(z.n(), 1u);
  EXPECT_EQ(z.total_added(), 0.0);
  for (double v : z.accumulated()) EXPECT_EQ(v, 0.0);
}

TEST(StepTest, RejectsOutOfRangeState) {
  EXPECT_THROW(step(UrnState::Initial(fixtures::PolyaSpec()), 5), Error);
}

TEST(UrnSpecTest, Validation) {
  const auto nu = ProbabilityVector::Uniform(Labels(2));
  EXPECT_THROW(UrnSpec(0.0, nu, FiniteKernel::Identity(Labels(2))), Error);
  EXPECT_THROW(UrnSpec(1.0, nu, FiniteKernel::Identity(Labels(3))), Error);
}

TEST(UrnPropertyTest, PredictiveIsProbability) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const FiniteSpace s = Labels(1 + testgen::UniformIndex(rng, 5));
    auto rows = testgen::Rows(testgen::RandomStochastic(rng, s));
    for (auto& r : rows) {
      const double m = rng.bernoulli(0.2) ? 0.0 : testgen::UniformIn(rng, 0.1, 4);
      for (double& v : r) v *= m;
    }
    const UrnSpec spec(testgen::UniformIn(rng, 0.1, 5), testgen::RandomNu(rng, s),
                       FiniteKernel(s, rows));
    const Trajectory t = simulate(spec, 30, trial, 0, true);
    UrnState state = UrnState::Initial(spec);
    for (std::size_t i = 0; i <= t.draws.size(); ++i) {
      const auto p = predictive(state);
      double total = 0.0;
      for (std::size_t y = 0; y < p.size(); ++y) {
        ASSERT_GE(p[y], 0.0);
        total += p[y];
        // Replaying the draws reproduces the recorded snapshots exactly.
        ASSERT_EQ(p[y], t.snapshots[i][y]);
      }
      ASSERT_NEAR(total, 1.0, kTol);
      double added = 0.0;
      for (double v : state.accumulated()) added += v;
      ASSERT_NEAR(added, state.total_added(), kTol);
      if (i < t.draws.size()) state.advance(t.draws[i]);
    }
  }
}

// One-step averages of the predictive reproduce it, for every spec that
// check_cid accepts.
TEST(UrnPropertyTest, MartingaleOnCidSpecs) {
  const std::vector<UrnSpec> specs = {fixtures::UnbalancedSpec(),
                                      fixtures::PolyaSpec(),
                                      fixtures::BlockSpec3(),
                                      fixtures::NullSpec3()};
  for (const auto& spec : specs) {
    ASSERT_TRUE(check_cid(spec, 4).passed);
    const std::size_t k = spec.space().size();
    std::vector<std::size_t> h;
    std::function<void()> visit = [&] {
      const UrnState state = replay(spec, h);
      const auto p = predictive(state);
      for (std::size_t y = 0; y < k; ++y) {
        double avg = 0.0;
        for (std::size_t x = 0; x < k; ++x) {
          avg += p[x] * predictive(step(state, x))[y];
        }
        ASSERT_NEAR(avg, p[y], kTol);
      }
      if (h.size() == 4) return;
      for (std::size_t x = 0; x < k; ++x) {
        h.push_back(x);
        visit();
        h.pop_back();
      }
    };
    visit();
  }
}

TEST(UrnPropertyTest, NullMassIsConstantOffTheNullSet) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const FiniteSpace s = Labels(2 + testgen::UniformIndex(rng, 5));
    const auto nu = testgen::RandomNu(rng, s);
    // Z = the last one or two states; singletons elsewhere.
    const std::size_t zsize = s.size() > 2 && rng.bernoulli(0.5) ? 2 : 1;
    std::vector<std::size_t> z;
    std::vector<std::size_t> block_of(s.size());
    for (std::size_t x = 0; x < s.size(); ++x) block_of[x] = x;
    for (std::size_t i = 0; i < zsize; ++i) {
      z.push_back(s.size() - 1 - i);
      block_of[s.size() - 1 - i] = s.size() - 1;
    }
    const Partition p = Partition::FromBlockOf(s, block_of);
    const UrnSpec spec(testgen::UniformIn(rng, 0.2, 5), nu,
                       exchangeable_kernel_from_partition(nu, p, z));
    const double nu_z = nu.mass_of(z);
    UrnState state = UrnState::Initial(spec);
    for (int i = 0; i < 20; ++i) {
      double pz = 0.0;
      for (std::size_t x : z) pz += state.predictive_at(x);
      ASSERT_NEAR(pz, nu_z, 1e-15);
      state.advance(testgen::UniformIndex(rng, s.size() - zsize));
    }
  }
}

TEST(SimulateTest, EmptyAndDeterministic) {
  const auto spec = fixtures::UnbalancedSpec();
  EXPECT_TRUE(simulate(spec, 0, 1).draws.empty());
  const auto a = simulate(spec, 100, 42, 3);
  const auto b = simulate(spec, 100, 42, 3);
  EXPECT_EQ(a.draws, b.draws);
  EXPECT_NE(a.draws, simulate(spec, 100, 42, 4).draws);
}

TEST(SimulateTest, TwoStepPolyaFrequency) {
  const auto spec = std::make_shared<UrnSpec>(fixtures::PolyaSpec());
  const std::size_t n = 100000;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto t = simulate(*spec, 2, 2024, r);
    hits += (t.draws[0] == 0 && t.draws[1] == 0) ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / n;
  const double se = std::sqrt(0.375 * 0.625 / n);
  EXPECT_LE(std::abs(p - 0.375), 3 * se);
}

TEST(TrajectoryIoTest, RoundTrip) {
  const auto spec = fixtures::UnbalancedSpec();
  const auto t = simulate(spec, 25, 8, 2);
  std::stringstream ss;
  write_trajectory(ss, t, spec.space());
  const TrajectoryFile f = read_trajectory(ss, spec.space());
  EXPECT_EQ(f.draws, t.draws);
  EXPECT_EQ(f.seed, 8u);
  EXPECT_EQ(f.replicate, 2u);
  EXPECT_EQ(f.spec_hash, spec_hash(spec));
  EXPECT_NE(spec_hash(spec), spec_hash(fixtures::PolyaSpec()));
}

TEST(GeneralSimulateTest, DeltaDistinctValues) {
  const GeneralUrnSpec spec{1.0, builtin::Delta(BaseMeasure::Normal(0, 1))};
  const std::size_t n = 100000;
  std::vector<double> distinct;
  distinct.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto t = general_simulate(spec, 2, 77, r);
    distinct.push_back(t.points[0] == t.points[1] ? 1.0 : 2.0);
  }
  const McEstimate e = Summarize(distinct);
  EXPECT_LE(std::abs(e.mean - 1.5), 3 * e.standard_error);
}

TEST(GeneralSimulateTest, SymmetrizedRedrawsKeepAbsoluteValue) {
  const GeneralUrnSpec spec{2.0, builtin::Symmetrized(BaseMeasure::Normal(0, 1))};
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto t = general_simulate(spec, 30, 5, r);
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      if (t.parents[i] < 0) continue;
      const std::size_t parent = static_cast<std::size_t>(t.parents[i]);
      ASSERT_LT(parent, i);
      ASSERT_EQ(std::abs(t.points[i]), std::abs(t.points[parent]));
    }
  }
}

TEST(GeneralSimulateTest, HistogramRedrawsStayInBin) {
  const auto kernel =
      builtin::Histogram(BaseMeasure::Normal(0, 1), {-1.0, 0.0, 1.0});
  const GeneralUrnSpec spec{1.0, kernel};
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto t = general_simulate(spec, 30, 6, r);
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      if (t.parents[i] < 0) continue;
      ASSERT_EQ(kernel.atom_map(t.points[i]),
                kernel.atom_map(t.points[static_cast<std::size_t>(t.parents[i])]));
    }
  }
}

TEST(GeneralSimulateTest, Deterministic) {
  const GeneralUrnSpec spec{1.5, builtin::Symmetrized(BaseMeasure::Normal(0, 1))};
  const auto a = general_simulate(spec, 50, 9, 1);
  const auto b = general_simulate(spec, 50, 9, 1);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.parents, b.parents);
}

TEST(CidRecursionTest, NoLearning) {
  const auto nu = fixtures::Nu3();
  const auto t = cid_recursion_simulate(nu, FiniteKernel::Identity(nu.space()),
                                        ConstantQ(1.0), 20, 4);
  ASSERT_EQ(t.snapshots.size(), 21u);
  for (const auto& p : t.snapshots) {
    for (std::size_t y = 0; y < 3; ++y) EXPECT_EQ(p[y], nu[y]);
  }
}

TEST(CidRecursionTest, FullReplacement) {
  const auto spec = fixtures::BlockSpec3();
  const auto t = cid_recursion_simulate(spec.nu, spec.kernel, ConstantQ(0.0), 20, 4);
  for (std::size_t n = 1; n <= 20; ++n) {
    const auto row = spec.kernel.row(t.draws[n - 1]);
    for (std::size_t y = 0; y < 3; ++y) EXPECT_EQ(t.snapshots[n][y], row[y]);
  }
}

TEST(CidRecursionTest, BalancedQReproducesPolyaPredictives) {
  const auto spec = fixtures::PolyaSpec(1.0, 3);
  const std::size_t k = 3;
  std::vector<std::size_t> path(6);
  for (std::size_t code = 0; code < 729; ++code) {
    std::size_t c = code;
    for (auto& x : path) {
      x = c % k;
      c /= k;
    }
    const auto preds =
        cid_recursion_predictives(spec.nu, spec.kernel, BalancedQ(1.0), path);
    UrnState state = UrnState::Initial(spec);
    for (std::size_t n = 0; n <= path.size(); ++n) {
      for (std::size_t y = 0; y < k; ++y) {
        ASSERT_NEAR(preds[n][y], state.predictive_at(y), kTol);
      }
      if (n < path.size()) state.advance(path[n]);
    }
  }
}

TEST(CidRecursionTest, Errors) {
  const auto nu = fixtures::Nu3();
  const std::vector<std::size_t> path = {0, 1};
  try {
    cid_recursion_predictives(nu, FiniteKernel::Identity(nu.space()),
                              ConstantQ(1.5), path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadQ);
  }
  EXPECT_THROW(cid_recursion_predictives(nu, fixtures::NullSpec3().kernel,
                                         ConstantQ(0.5), path),
               Error);
}

}  // namespace
}  // namespace mvps
