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

// Exercises the shared library through mvps.h only.

#include "mvps/mvps.h"

#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

const double kNu4[] = {0.2, 0.3, 0.2, 0.3};
const double kCidRows[] = {0.2, 0.3, 0, 0,  0.4, 0.6, 0, 0,
                           0, 0, 0.2, 0.3,  0, 0, 0.4, 0.6};

struct Fixture {
  mvps_space* space = nullptr;
  mvps_kernel* kernel = nullptr;
  mvps_spec* spec = nullptr;
  Fixture() {
    EXPECT_EQ(mvps_space_create(4, nullptr, &space), MVPS_OK);
    EXPECT_EQ(mvps_kernel_create(space, kCidRows, &kernel), MVPS_OK);
    EXPECT_EQ(mvps_spec_create(1.0, kNu4, kernel, &spec), MVPS_OK);
  }
  ~Fixture() {
    mvps_spec_free(spec);
    mvps_kernel_free(kernel);
    mvps_space_free(space);
  }
};

// Takes the out-parameter by address: it is only read after the call ran.
bool Passed(mvps_status s, mvps_report** r) {
  EXPECT_EQ(s, MVPS_OK) << mvps_last_error();
  const bool p = mvps_report_passed(*r) != 0;
  mvps_report_free(*r);
  *r = nullptr;
  return p;
}

TEST(CapiTest, Metadata) {
  EXPECT_STREQ(mvps_version(), "1.0.0");
  EXPECT_STREQ(mvps_status_name(MVPS_TOO_LARGE), "TooLarge");
  EXPECT_STREQ(mvps_status_name(MVPS_INTERNAL), "Internal");
  EXPECT_EQ(mvps_subcommand_count(), 12u);
  EXPECT_STREQ(mvps_subcommand_name(0), "simulate");
  EXPECT_EQ(mvps_subcommand_name(12), nullptr);
}

TEST(CapiTest, SpacesAndLabels) {
  const char* labels[] = {"a", "b"};
  mvps_space* s = nullptr;
  ASSERT_EQ(mvps_space_create(2, labels, &s), MVPS_OK);
  EXPECT_EQ(mvps_space_size(s), 2u);
  EXPECT_STREQ(mvps_space_label(s, 1), "b");
  EXPECT_EQ(mvps_space_label(s, 2), nullptr);
  mvps_space_free(s);
  const char* dup[] = {"a", "a"};
  EXPECT_EQ(mvps_space_create(2, dup, &s), MVPS_INVALID_ARGUMENT);
  EXPECT_STRNE(mvps_last_error(), "");
}

TEST(CapiTest, ErrorsCarryCodesAndMessages) {
  mvps_space* s = nullptr;
  ASSERT_EQ(mvps_space_create(2, nullptr, &s), MVPS_OK);
  const double negative[] = {1.2, -0.2, 0, 1};
  mvps_kernel* k = nullptr;
  EXPECT_EQ(mvps_kernel_create(s, negative, &k), MVPS_NEGATIVE_ENTRIES);
  EXPECT_EQ(k, nullptr);
  mvps_report* r = nullptr;
  ASSERT_EQ(mvps_detect_negative(s, negative, &r), MVPS_OK);
  EXPECT_EQ(mvps_report_passed(r), 0);
  EXPECT_DOUBLE_EQ(mvps_report_max_residual(r), 0.2);
  mvps_report_free(r);
  EXPECT_STREQ(mvps_last_error(), "");

  size_t levels = 0;
  EXPECT_EQ(mvps_truncation_level(2.0, 1.5, &levels, nullptr), MVPS_INVALID_ARGUMENT);
  EXPECT_EQ(mvps_check_balanced(nullptr, nullptr, &r), MVPS_INVALID_ARGUMENT);
  mvps_space_free(s);
}

TEST(CapiTest, CounterexampleChecks) {
  Fixture f;
  mvps_report* r = nullptr;
  EXPECT_FALSE(Passed(mvps_check_balanced(f.kernel, kNu4, &r), &r));
  EXPECT_TRUE(Passed(mvps_check_cid(f.spec, 4, 1e-12, &r), &r));
  EXPECT_TRUE(Passed(mvps_check_cid_structure(f.kernel, kNu4, &r), &r));

  ASSERT_EQ(mvps_check_exchangeable(f.spec, 4, 1e-12, &r), MVPS_OK);
  EXPECT_EQ(mvps_report_passed(r), 0);
  char* json = nullptr;
  ASSERT_EQ(mvps_report_json(r, &json), MVPS_OK);
  EXPECT_NE(std::string(json).find("\"witness\""), std::string::npos);
  mvps_string_free(json);
  mvps_report_free(r);

  EXPECT_EQ(mvps_check_cid(f.spec, 20, 1e-12, &r), MVPS_TOO_LARGE);
}

TEST(CapiTest, Decomposition) {
  Fixture f;
  mvps_report* r = nullptr;
  mvps_partition* p = nullptr;
  size_t null_block = 0;
  ASSERT_EQ(mvps_decompose_blocks(f.kernel, kNu4, &r, &p, &null_block), MVPS_OK);
  EXPECT_EQ(mvps_report_passed(r), 1);
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(null_block, SIZE_MAX);
  EXPECT_EQ(mvps_partition_num_blocks(p), 2u);
  EXPECT_EQ(mvps_partition_block_of(p, 0), mvps_partition_block_of(p, 1));
  EXPECT_NE(mvps_partition_block_of(p, 1), mvps_partition_block_of(p, 2));
  mvps_partition_free(p);
  mvps_report_free(r);

  mvps_partition* atoms = nullptr;
  ASSERT_EQ(mvps_atoms_of_kernel(f.kernel, &atoms), MVPS_OK);
  mvps_kernel* canon = nullptr;
  ASSERT_EQ(mvps_kernel_canonicalize(f.kernel, &canon), MVPS_OK);
  EXPECT_NEAR(mvps_kernel_mass(canon, 1), 1.0, 1e-15);
  EXPECT_TRUE(Passed(mvps_check_proper(canon, kNu4, atoms, &r), &r));
  EXPECT_TRUE(Passed(mvps_check_stationary(canon, kNu4, &r), &r));
  EXPECT_TRUE(Passed(mvps_check_self_averaging(canon, kNu4, &r), &r));
  mvps_kernel_free(canon);
  mvps_partition_free(atoms);
}

TEST(CapiTest, UrnAndExactLaw) {
  mvps_space* s = nullptr;
  mvps_kernel* id = nullptr;
  mvps_spec* spec = nullptr;
  const double nu[] = {0.5, 0.5};
  ASSERT_EQ(mvps_space_create(2, nullptr, &s), MVPS_OK);
  ASSERT_EQ(mvps_kernel_identity(s, &id), MVPS_OK);
  ASSERT_EQ(mvps_spec_create(1.0, nu, id, &spec), MVPS_OK);

  double pred[2];
  const size_t history[] = {0};
  ASSERT_EQ(mvps_predictive(spec, history, 1, pred), MVPS_OK);
  EXPECT_DOUBLE_EQ(pred[0], 0.75);

  std::vector<double> table(8);
  ASSERT_EQ(mvps_joint_law(spec, 3, table.data(), table.size()), MVPS_OK);
  EXPECT_NEAR(std::accumulate(table.begin(), table.end(), 0.0), 1.0, 1e-15);
  EXPECT_EQ(mvps_joint_law(spec, 3, table.data(), 7), MVPS_INVALID_ARGUMENT);
  double ps = 0;
  const size_t tuple[] = {0, 0, 1};
  ASSERT_EQ(mvps_ps_joint_law(1.0, nu, 2, tuple, 3, &ps), MVPS_OK);
  EXPECT_NEAR(table[1], ps, 1e-15);

  std::vector<size_t> a(50), b(50);
  ASSERT_EQ(mvps_simulate(spec, 50, 7, 0, a.data()), MVPS_OK);
  ASSERT_EQ(mvps_simulate(spec, 50, 7, 0, b.data()), MVPS_OK);
  EXPECT_EQ(a, b);

  mvps_spec_free(spec);
  mvps_kernel_free(id);
  mvps_space_free(s);
}

TEST(CapiTest, ProjectionAndSamplers) {
  mvps_space* s = nullptr;
  ASSERT_EQ(mvps_space_create(3, nullptr, &s), MVPS_OK);
  const double nu[] = {0.25, 0.25, 0.5};
  const size_t blocks[] = {0, 0, 1};
  const size_t singles[] = {0, 1, 2};
  mvps_partition *p = nullptr, *sp = nullptr;
  ASSERT_EQ(mvps_partition_create(s, blocks, &p), MVPS_OK);
  ASSERT_EQ(mvps_partition_create(s, singles, &sp), MVPS_OK);
  mvps_kernel *k = nullptr, *kz = nullptr;
  ASSERT_EQ(mvps_kernel_from_partition(s, nu, p, nullptr, 0, &k), MVPS_OK);
  const size_t z[] = {2};
  ASSERT_EQ(mvps_kernel_from_partition(s, nu, sp, z, 1, &kz), MVPS_OK);
  mvps_spec *spec = nullptr, *zspec = nullptr;
  ASSERT_EQ(mvps_spec_create(1.0, nu, k, &spec), MVPS_OK);
  ASSERT_EQ(mvps_spec_create(1.0, nu, kz, &zspec), MVPS_OK);

  mvps_report* r = nullptr;
  EXPECT_TRUE(Passed(mvps_project_atoms(spec, p, 3, nullptr, 0, &r), &r));
  EXPECT_TRUE(Passed(mvps_project_atoms(zspec, sp, 3, z, 1, &r), &r));
  EXPECT_TRUE(Passed(mvps_check_exchangeable(zspec, 4, 1e-12, &r), &r));

  size_t levels = 0;
  double residual = 0;
  ASSERT_EQ(mvps_truncation_level(2.0, 1e-8, &levels, &residual), MVPS_OK);
  EXPECT_EQ(levels, 46u);
  const long double exact = std::pow(2.0L / 3.0L, 46);
  EXPECT_LE(std::abs((residual - exact) / exact), 1e-15L);

  double m[3];
  ASSERT_EQ(mvps_sample_dp(1.0, nu, 3, 30, 1, 0, m), MVPS_OK);
  EXPECT_NEAR(m[0] + m[1] + m[2], 1.0, 1e-12);
  ASSERT_EQ(mvps_sample_kernel_sb(1.0, nu, k, 30, 1, 0, m), MVPS_OK);
  EXPECT_NEAR(m[0] + m[1] + m[2], 1.0, 1e-12);
  EXPECT_EQ(mvps_sample_kernel_sb(1.0, nu, kz, 30, 1, 0, m), MVPS_HYPOTHESIS_VIOLATED);
  const size_t data[] = {0, 2};
  ASSERT_EQ(mvps_sample_posterior(spec, data, 2, 30, 1, 0, m), MVPS_OK);
  EXPECT_NEAR(m[0] + m[1] + m[2], 1.0, 1e-12);

  size_t labels[5], samples[5];
  ASSERT_EQ(mvps_sample_hierarchical(1.0, nu, p, 5, 30, 1, 0, labels, samples), MVPS_OK);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(labels[i], blocks[samples[i]]);
  ASSERT_EQ(mvps_sample_null_mixture(1.0, nu, sp, z, 1, 5, 1, 0, labels, samples),
            MVPS_OK);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(labels[i] == SIZE_MAX, samples[i] == 2);
  }
  EXPECT_EQ(mvps_sample_null_mixture(1.0, nu, sp, nullptr, 0, 5, 1, 0, labels, samples),
            MVPS_BAD_NULL_SET);

  mvps_spec_free(spec);
  mvps_spec_free(zspec);
  mvps_kernel_free(k);
  mvps_kernel_free(kz);
  mvps_partition_free(p);
  mvps_partition_free(sp);
  mvps_space_free(s);
}

TEST(CapiTest, RunSubcommands) {
  const fs::path out =
      fs::temp_directory_path() / ("mvps-capi-" + std::to_string(::getpid()));
  const std::string cfg = std::string(MVPS_SOURCE_DIR) + "/configs/";
  mvps_run_overrides o{};
  const std::string dir = out.string();
  o.out = dir.c_str();
  int code = -1;
  EXPECT_EQ(mvps_run("check-cid", (cfg + "cid_example.json").c_str(), &o, &code), MVPS_OK);
  EXPECT_EQ(code, 0);
  EXPECT_EQ(mvps_run("check-exchangeable", (cfg + "cid_example.json").c_str(), &o, &code),
            MVPS_OK);
  EXPECT_EQ(code, 1);
  EXPECT_EQ(mvps_run("simulate", (cfg + "invalid.json").c_str(), nullptr, &code),
            MVPS_CONFIG_INVALID);
  EXPECT_EQ(code, 2);
  EXPECT_NE(std::string(mvps_last_error()).find("/model/nu"), std::string::npos);
  EXPECT_EQ(mvps_run(nullptr, "x", nullptr, &code), MVPS_INVALID_ARGUMENT);
  EXPECT_EQ(code, 2);
  fs::remove_all(out);
}

}  // namespace
