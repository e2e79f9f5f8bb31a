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

#include "mvps/kernel.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "mvps/error.hpp"
#include "mvps/rng.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

namespace mvps {
namespace {

using fixtures::Labels;
using fixtures::UnbalancedKernel;
using fixtures::UnbalancedNu;

template <class F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

std::vector<std::vector<std::size_t>> BlocksOf(const Partition& p) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t j = 0; j < p.num_blocks(); ++j) {
    out.emplace_back(p.block(j).begin(), p.block(j).end());
  }
  return out;
}

using Blocks = std::vector<std::vector<std::size_t>>;

TEST(PartitionTest, Validation) {
  EXPECT_EQ(CodeOf([] { Partition(Labels(3), {{0, 1}}); }),
            ErrorCode::kBadPartition);
  EXPECT_EQ(CodeOf([] { Partition(Labels(3), {{0, 1}, {1, 2}}); }),
            ErrorCode::kBadPartition);
  EXPECT_EQ(CodeOf([] { Partition(Labels(2), {{0}, {}, {1}}); }),
            ErrorCode::kBadPartition);
  const Partition p(Labels(3), {{2}, {1, 0}});
  EXPECT_EQ(BlocksOf(p), (Blocks{{0, 1}, {2}}));
  EXPECT_EQ(p.block_of(2), 1u);
  EXPECT_EQ(p.block_label(0), "1+2");
}

TEST(PartitionTest, PushForward) {
  const auto nu_pi = fixtures::Blocks3().push_forward(fixtures::Nu3());
  EXPECT_DOUBLE_EQ(nu_pi[0], 0.5);
  EXPECT_DOUBLE_EQ(nu_pi[1], 0.5);
}

TEST(FiniteKernelTest, MassesAndNullSet) {
  const FiniteKernel k(Labels(3), {{1, 1, 0}, {0, 2, 0}, {0, 0, 0}});
  EXPECT_DOUBLE_EQ(k.mass(0), 2.0);
  EXPECT_EQ(k.null_set(), std::vector<std::size_t>{2});
  EXPECT_FALSE(k.is_canonical());
  EXPECT_EQ(CodeOf([] { FiniteKernel(Labels(2), {{1, -0.1}, {0, 1}}); }),
            ErrorCode::kNegativeEntries);
}

TEST(DetectNegativeTest, Examples) {
  const std::vector<double> identity = {1, 0, 0, 1};
  EXPECT_TRUE(detect_negative(Labels(2), identity).passed);

  const std::vector<double> bad = {1, -0.1, 0, 1};
  const CheckReport r = detect_negative(Labels(2), bad);
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ((*r.witness)["row"], "1");
  EXPECT_EQ((*r.witness)["column"], "2");
  EXPECT_DOUBLE_EQ((*r.witness)["value"].get<double>(), -0.1);

  const auto k = UnbalancedKernel();
  EXPECT_TRUE(detect_negative(k.space(), k.entries()).passed);
}

TEST(CheckBalancedTest, Examples) {
  const auto nu = ProbabilityVector::Uniform(Labels(3));
  const CheckReport delta = check_balanced(FiniteKernel::Identity(Labels(3)), nu);
  EXPECT_TRUE(delta.passed);
  EXPECT_DOUBLE_EQ(delta.details.at("m"), 1.0);

  EXPECT_FALSE(check_balanced(UnbalancedKernel(), UnbalancedNu()).passed);

  const FiniteKernel two(Labels(3), {{1, 1, 0}, {0, 2, 0}, {0, 0, 0}});
  const CheckReport r =
      check_balanced(two, ProbabilityVector(Labels(3), {0.4, 0.4, 0.2}));
  EXPECT_TRUE(r.passed);
  EXPECT_DOUBLE_EQ(r.details.at("m"), 2.0);
  EXPECT_EQ(r.data["null_set"], nlohmann::json::array({"3"}));
}

TEST(CheckBalancedTest, IgnoresNuNullStatesAndNeedsPositivePart) {
  const FiniteKernel k(Labels(3), {{1, 0, 0}, {0, 5, 0}, {0, 0, 1}});
  EXPECT_TRUE(
      check_balanced(k, ProbabilityVector(Labels(3), {0.5, 0, 0.5})).passed);
  const FiniteKernel zero(Labels(2), {{0, 0}, {0, 0}});
  EXPECT_EQ(CodeOf([&] {
              check_balanced(zero, ProbabilityVector::Uniform(Labels(2)));
            }),
            ErrorCode::kEmptyPositivePart);
}

TEST(CanonicalizeTest, Examples) {
  const auto c = canonicalize(UnbalancedKernel());
  const std::vector<std::vector<double>> expected = {{0.4, 0.6, 0, 0},
                                                     {0.4, 0.6, 0, 0},
                                                     {0, 0, 0.4, 0.6},
                                                     {0, 0, 0.4, 0.6}};
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 4; ++y) EXPECT_NEAR(c(x, y), expected[x][y], 1e-15);
  }
  const auto id = FiniteKernel::Identity(Labels(3));
  const auto cid = canonicalize(id);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(cid.entries()[i], id.entries()[i]);
  const FiniteKernel zero(Labels(2), {{0, 0}, {0, 0}});
  EXPECT_EQ(canonicalize(zero).null_set().size(), 2u);
}

TEST(CanonicalizeTest, IdempotentAndPreservesStructure) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const FiniteSpace s = Labels(1 + testgen::UniformIndex(rng, 6));
    auto rows = testgen::Rows(testgen::RandomStochastic(rng, s));
    for (auto& r : rows) {
      const double m = rng.bernoulli(0.2) ? 0.0 : testgen::UniformIn(rng, 0.1, 3);
      for (double& v : r) v *= m;
    }
    const FiniteKernel k(s, rows);
    const auto c1 = canonicalize(k);
    const auto c2 = canonicalize(c1);
    for (std::size_t i = 0; i < c1.entries().size(); ++i) {
      ASSERT_EQ(c1.entries()[i], c2.entries()[i]);
    }
    EXPECT_EQ(c1.null_set(), k.null_set());
    EXPECT_TRUE(atoms_of_kernel(c1) == atoms_of_kernel(k));
  }
}

TEST(ScaledStationarityTest, Examples) {
  const auto nu = ProbabilityVector(Labels(3), {0.2, 0.3, 0.5});
  const CheckReport delta =
      check_scaled_stationarity(FiniteKernel::Identity(Labels(3)), nu);
  EXPECT_TRUE(delta.passed);
  EXPECT_DOUBLE_EQ(delta.details.at("c"), 1.0);

  const CheckReport ex = check_scaled_stationarity(UnbalancedKernel(), UnbalancedNu());
  EXPECT_TRUE(ex.passed);
  EXPECT_NEAR(ex.details.at("c"), 0.8, 1e-15);

  const FiniteKernel constant(Labels(2), {{1, 0}, {1, 0}});
  const CheckReport bad =
      check_scaled_stationarity(constant, ProbabilityVector::Uniform(Labels(2)));
  EXPECT_FALSE(bad.passed);
  EXPECT_NEAR(bad.max_residual, 0.5, 1e-15);
}

TEST(SelfAveragingTest, Examples) {
  const auto nu = ProbabilityVector::Uniform(Labels(2));
  EXPECT_TRUE(check_self_averaging(FiniteKernel::Identity(Labels(2)), nu).passed);
  EXPECT_TRUE(check_self_averaging(UnbalancedKernel(), UnbalancedNu()).passed);
  const FiniteKernel swap(Labels(2), {{0, 1}, {1, 0}});
  EXPECT_FALSE(check_self_averaging(swap, nu).passed);
}

TEST(AtomsOfKernelTest, Examples) {
  EXPECT_EQ(BlocksOf(atoms_of_kernel(UnbalancedKernel())),
            (Blocks{{0, 1}, {2, 3}}));
  EXPECT_EQ(atoms_of_kernel(FiniteKernel::Identity(Labels(3))).num_blocks(), 3u);
  EXPECT_EQ(atoms_of_kernel(FiniteKernel::Constant(fixtures::Nu3())).num_blocks(),
            1u);
}

TEST(CheckProperTest, Examples) {
  const auto spec = fixtures::BlockSpec3();
  EXPECT_TRUE(check_proper(spec.kernel, spec.nu, fixtures::Blocks3()).passed);

  const auto nu = ProbabilityVector::Uniform(Labels(2));
  const CheckReport constant = check_proper(FiniteKernel::Constant(nu), nu,
                                            Partition::Singletons(Labels(2)));
  EXPECT_FALSE(constant.passed);
  EXPECT_NEAR(constant.max_residual, 0.5, 1e-15);

  EXPECT_TRUE(check_proper(UnbalancedKernel(), UnbalancedNu(),
                           Partition(Labels(4), {{0, 1}, {2, 3}}))
                  .passed);
}

TEST(DecomposeBlocksTest, Examples) {
  const Decomposition ex = decompose_blocks(UnbalancedKernel(), UnbalancedNu());
  EXPECT_TRUE(ex.report.passed);
  ASSERT_TRUE(ex.partition.has_value());
  EXPECT_EQ(BlocksOf(*ex.partition), (Blocks{{0, 1}, {2, 3}}));
  EXPECT_FALSE(ex.null_block.has_value());

  const auto nu3 = ProbabilityVector::Uniform(Labels(3));
  const Decomposition delta =
      decompose_blocks(FiniteKernel::Identity(Labels(3)), nu3);
  EXPECT_TRUE(delta.report.passed);
  EXPECT_EQ(delta.partition->num_blocks(), 3u);

  const FiniteKernel bad(Labels(3),
                         {{0.5, 0.5, 0}, {0.6, 0.4, 0}, {0, 0, 1}});
  const Decomposition fail = decompose_blocks(bad, nu3);
  EXPECT_FALSE(fail.report.passed);
  EXPECT_FALSE(fail.partition.has_value());
  ASSERT_TRUE(fail.report.witness.has_value());
}

TEST(DecomposeBlocksTest, NeedsPositiveSupport) {
  EXPECT_EQ(CodeOf([] {
              decompose_blocks(FiniteKernel::Identity(Labels(2)),
                               ProbabilityVector(Labels(2), {1, 0}));
            }),
            ErrorCode::kPositiveSupportRequired);
}

TEST(DecomposeBlocksTest, TransientStatesFail) {
  // State 3 leaks into the closed class {1,2} and is never revisited.
  const FiniteKernel k(Labels(3), {{0.5, 0.5, 0}, {0.5, 0.5, 0}, {0.5, 0.5, 0}});
  const auto nu = ProbabilityVector::Uniform(Labels(3));
  EXPECT_FALSE(decompose_blocks(k, nu).report.passed);
}

TEST(DecomposeBlocksTest, NullPartIsFlagged) {
  const auto spec = fixtures::NullSpec3();
  const Decomposition d = decompose_blocks(spec.kernel, spec.nu);
  EXPECT_TRUE(d.report.passed);
  ASSERT_TRUE(d.null_block.has_value());
  EXPECT_EQ(std::vector<std::size_t>(d.partition->block(*d.null_block).begin(),
                                     d.partition->block(*d.null_block).end()),
            std::vector<std::size_t>{2});
}

TEST(ExchangeableKernelTest, Examples) {
  const auto nu = fixtures::Nu3();
  const auto k = exchangeable_kernel_from_partition(nu, fixtures::Blocks3());
  const std::vector<double> expected = {0.5, 0.5, 0, 0.5, 0.5, 0, 0, 0, 1};
  for (std::size_t i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(k.entries()[i], expected[i]);

  const auto n = fixtures::NullSpec3().kernel;
  const std::vector<double> expected_null = {0.5, 0, 0.5, 0, 0.5, 0.5, 0, 0, 0};
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_DOUBLE_EQ(n.entries()[i], expected_null[i]);
  }

  const auto u = ProbabilityVector::Uniform(Labels(2));
  const auto iid = exchangeable_kernel_from_partition(u, Partition::OneBlock(Labels(2)));
  for (double v : iid.entries()) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(ExchangeableKernelTest, Errors) {
  const auto nu = ProbabilityVector(Labels(3), {0.5, 0.5, 0});
  EXPECT_EQ(CodeOf([&] {
              exchangeable_kernel_from_partition(
                  nu, Partition(Labels(3), {{0, 1}, {2}}));
            }),
            ErrorCode::kBadPartition);
  const std::vector<std::size_t> z = {2};
  EXPECT_EQ(CodeOf([&] {
              exchangeable_kernel_from_partition(
                  fixtures::Nu3(), Partition(Labels(3), {{0}, {1, 2}}), z);
            }),
            ErrorCode::kBadPartition);
  const std::vector<std::size_t> all = {0, 1, 2};
  EXPECT_EQ(CodeOf([&] {
              exchangeable_kernel_from_partition(
                  fixtures::Nu3(), Partition::Singletons(Labels(3)), all);
            }),
            ErrorCode::kBadNullSet);
}

TEST(KernelPropertyTest, ConstructorDecomposerRoundTrip) {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const FiniteSpace s = Labels(1 + testgen::UniformIndex(rng, 6));
    const auto nu = testgen::RandomNu(rng, s);
    const Partition p = testgen::RandomPartition(rng, s);
    const Decomposition d =
        decompose_blocks(exchangeable_kernel_from_partition(nu, p), nu);
    ASSERT_TRUE(d.report.passed);
    ASSERT_TRUE(*d.partition == p);
  }
}

// For canonical kernels with positive nu: stationary and self-averaging
// with c = 1 iff decompose_blocks succeeds.
TEST(KernelPropertyTest, StationarySelfAveragingIffBlockDiagonal) {
  Rng rng(37);
  int positives = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const FiniteSpace s = Labels(1 + testgen::UniformIndex(rng, 6));
    const auto nu = testgen::RandomNu(rng, s);
    const Partition p = testgen::RandomPartition(rng, s);
    FiniteKernel k = exchangeable_kernel_from_partition(nu, p);
    switch (trial % 4) {
      case 1: k = testgen::Perturbed(rng, k, true); break;
      case 2: k = testgen::BlockSupportedKernel(rng, p); break;
      case 3: k = testgen::RandomStochastic(rng, s); break;
      default: break;
    }
    const bool lhs = check_scaled_stationarity(k, nu).passed &&
                     check_self_averaging(k, nu).passed;
    const bool rhs = decompose_blocks(k, nu).report.passed;
    ASSERT_EQ(lhs, rhs) << "trial " << trial;
    positives += rhs ? 1 : 0;
  }
  EXPECT_GT(positives, 100);
  EXPECT_LT(positives, 550);
}

TEST(KernelPropertyTest, ProperIffBlockStationaryAndSelfAveraging) {
  Rng rng(41);
  int proper = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const FiniteSpace s = Labels(1 + testgen::UniformIndex(rng, 6));
    const auto nu = testgen::RandomNu(rng, s);
    const Partition p = testgen::RandomPartition(rng, s);
    FiniteKernel k = exchangeable_kernel_from_partition(nu, p);
    switch (trial % 5) {
      case 1: k = testgen::Perturbed(rng, k, true); break;
      case 2: k = testgen::BlockSupportedKernel(rng, p); break;
      case 3: k = testgen::IdempotentWithTransients(rng, p); break;
      case 4: k = testgen::RandomStochastic(rng, s); break;
      default: break;
    }
    const Partition atoms = atoms_of_kernel(k);
    const bool lhs = check_proper(k, nu, atoms).passed;
    const bool rhs = check_scaled_stationarity_on_blocks(k, nu, atoms).passed &&
                     check_self_averaging(k, nu).passed;
    ASSERT_EQ(lhs, rhs) << "trial " << trial;
    proper += lhs ? 1 : 0;
  }
  EXPECT_GT(proper, 200);
  EXPECT_LT(proper, 900);
}

}  // namespace
}  // namespace mvps
