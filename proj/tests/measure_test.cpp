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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mvps/error.hpp"
#include "mvps/exactlaw.hpp"
#include "mvps/rng.hpp"
#include "support/generators.hpp"

namespace mvps {
namespace {

FiniteSpace Space(std::size_t k) { return FiniteSpace::Numbered(k); }

TEST(FiniteSpaceTest, RejectsDuplicateAndEmptyLabels) {
  EXPECT_THROW(FiniteSpace({"a", "a"}), Error);
  EXPECT_THROW(FiniteSpace(std::vector<std::string>{}), Error);
  FiniteSpace s({"x", "y"});
  EXPECT_EQ(s.index_of("y"), 1u);
  EXPECT_FALSE(s.contains("z"));
}

TEST(FiniteMeasureTest, RejectsNegativeWeights) {
  EXPECT_THROW(FiniteMeasure(Space(2), {0.5, -0.1}), Error);
  EXPECT_THROW(FiniteMeasure(Space(2), {1.0}), Error);
}

TEST(NormalizeTest, DividesByTotal) {
  const auto p = normalize(FiniteMeasure(Space(4), {0.4, 0.6, 0.2, 0.3}));
  EXPECT_NEAR(p[0], 0.26667, 1e-5);
  EXPECT_NEAR(p[1], 0.4, 1e-5);
  EXPECT_NEAR(p[2], 0.13333, 1e-5);
  EXPECT_NEAR(p[3], 0.2, 1e-5);
}

TEST(NormalizeTest, AlreadyNormalized) {
  const auto p = normalize(FiniteMeasure(Space(3), {1, 0, 0}));
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 0.0);
}

TEST(NormalizeTest, ZeroMassThrows) {
  try {
    normalize(FiniteMeasure(Space(2), {0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroMass);
  }
}

TEST(NormalizeTest, IsExactFixedPoint) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + testgen::UniformIndex(rng, 8);
    std::vector<double> w(k);
    for (double& v : w) v = rng.uniform() * 10.0 + 1e-3;
    const auto once = normalize(FiniteMeasure(Space(k), w));
    const auto twice = normalize(once.measure());
    for (std::size_t i = 0; i < k; ++i) ASSERT_EQ(once[i], twice[i]);
  }
}

TEST(TvDistanceTest, Examples) {
  const ProbabilityVector a(Space(2), {1, 0});
  const ProbabilityVector b(Space(2), {0, 1});
  EXPECT_EQ(tv_distance(a, a), 0.0);
  EXPECT_EQ(tv_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(tv_distance(ProbabilityVector(Space(2), {0.5, 0.5}),
                               ProbabilityVector(Space(2), {0.75, 0.25})),
                   0.25);
}

TEST(TvDistanceTest, SpaceMismatch) {
  try {
    tv_distance(ProbabilityVector::Uniform(Space(2)),
                ProbabilityVector::Uniform(Space(3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpaceMismatch);
  }
}

TEST(TvDistanceTest, MetricAxiomsOnRandomTriples) {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const FiniteSpace s = Space(1 + testgen::UniformIndex(rng, 6));
    const auto p = testgen::RandomNu(rng, s, 0.0);
    const auto q = testgen::RandomNu(rng, s, 0.0);
    const auto r = testgen::RandomNu(rng, s, 0.0);
    EXPECT_EQ(tv_distance(p, q), tv_distance(q, p));
    EXPECT_LE(tv_distance(p, p), kTol);
    EXPECT_LE(tv_distance(p, r), tv_distance(p, q) + tv_distance(q, r) + kTol);
    EXPECT_GE(tv_distance(p, q), 0.0);
    EXPECT_LE(tv_distance(p, q), 1.0);
  }
}

TEST(MixTest, Examples) {
  const ProbabilityVector p(Space(3), {0.2, 0.3, 0.5});
  const std::vector<double> one = {1.0};
  const std::vector<ProbabilityVector> single = {p};
  const auto same = mix(one, single);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(same[i], p[i]);

  const std::vector<double> half = {0.5, 0.5};
  const std::vector<ProbabilityVector> ends = {
      ProbabilityVector(Space(3), {1, 0, 0}),
      ProbabilityVector(Space(3), {0, 0, 1})};
  const auto m = mix(half, ends);
  EXPECT_DOUBLE_EQ(m[0], 0.5);
  EXPECT_DOUBLE_EQ(m[1], 0.0);
  EXPECT_DOUBLE_EQ(m[2], 0.5);

  const std::vector<ProbabilityVector> null_row = {
      ProbabilityVector(Space(3), {0.5, 0.5, 0}),
      ProbabilityVector(Space(3), {0, 0, 1})};
  const auto n = mix(half, null_row);
  EXPECT_DOUBLE_EQ(n[0], 0.25);
  EXPECT_DOUBLE_EQ(n[1], 0.25);
  EXPECT_DOUBLE_EQ(n[2], 0.5);
}

TEST(MixTest, Errors) {
  const std::vector<ProbabilityVector> two = {
      ProbabilityVector::Uniform(Space(2)), ProbabilityVector::Uniform(Space(2))};
  const std::vector<double> bad_sum = {0.5, 0.6};
  const std::vector<double> negative = {1.5, -0.5};
  for (const auto& c : {bad_sum, negative}) {
    try {
      mix(c, two);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadCoefficients);
    }
  }
  const std::vector<ProbabilityVector> mismatched = {
      ProbabilityVector::Uniform(Space(2)), ProbabilityVector::Uniform(Space(3))};
  const std::vector<double> half = {0.5, 0.5};
  try {
    mix(half, mismatched);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSpaceMismatch);
  }
}

TEST(DpProductMomentTest, Examples) {
  const auto nu = ProbabilityVector::Uniform(Space(2));
  EXPECT_DOUBLE_EQ(dp_product_moment(1.0, nu, 0, 0), 0.375);
  EXPECT_DOUBLE_EQ(dp_product_moment(1.0, nu, 0, 1), 0.125);
  EXPECT_NEAR(dp_product_moment(1e6, nu, 0, 0), 0.25, 1e-6);
}

TEST(DpProductMomentTest, MatchesTwoStepPolyaLaw) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const FiniteSpace s = Space(1 + testgen::UniformIndex(rng, 6));
    const auto nu = testgen::RandomNu(rng, s, 0.0);
    const double theta = testgen::UniformIn(rng, 0.01, 20.0);
    const std::size_t a = testgen::UniformIndex(rng, s.size());
    const std::size_t b = testgen::UniformIndex(rng, s.size());
    const std::vector<std::size_t> aa = {a, a};
    const std::vector<std::size_t> ab = {a, b};
    EXPECT_NEAR(dp_product_moment(theta, nu, a, a), ps_joint_law(theta, nu, aa),
                kTol);
    EXPECT_NEAR(dp_product_moment(theta, nu, a, b), ps_joint_law(theta, nu, ab),
                kTol);
  }
}

TEST(ConditionalTest, RestrictsAndRenormalizes) {
  const ProbabilityVector nu(Space(3), {0.25, 0.25, 0.5});
  const std::vector<std::size_t> block = {0, 1};
  const auto c = conditional(nu, block);
  EXPECT_DOUBLE_EQ(c[0], 0.5);
  EXPECT_DOUBLE_EQ(c[1], 0.5);
  EXPECT_EQ(c[2], 0.0);
}

}  // namespace
}  // namespace mvps
