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

// Configuration-driven experiments: config parsing and validation, and the
// subcommands behind the command-line tool.

#ifndef MVPS_EXPERIMENT_HPP_
#define MVPS_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvps/error.hpp"
#include "mvps/general_kernel.hpp"
#include "mvps/kernel.hpp"
#include "mvps/measure.hpp"

namespace mvps {

inline constexpr const char* kConfigSchemaVersion = "1";
inline constexpr const char* kOutputEnvVar = "MVPS_OUT";
inline constexpr const char* kDefaultOutputDirectory = "mvps-out";

struct GeneralKernelConfig {
  std::string name;  // delta | symmetrized | histogram | shifted
  BaseMeasure base;
  double center = 0.0;
  std::vector<double> edges;
  double shift = 0.0;

  GeneralKernel build() const;
};

struct ModelConfig {
  enum class KernelKind { kMatrix, kIdentity, kConstant, kPartition, kGeneral };

  double theta = 1.0;
  KernelKind kind = KernelKind::kMatrix;
  // Finite models only.
  std::optional<FiniteSpace> space;
  std::optional<ProbabilityVector> nu;
  std::vector<double> matrix;  // row-major, may hold negative entries
  bool has_negative_entries = false;
  std::optional<Partition> partition;
  std::vector<std::size_t> null_set;
  // General models only.
  std::optional<GeneralKernelConfig> general;

  bool is_finite() const { return kind != KernelKind::kGeneral; }
  // Throws kNegativeEntries for matrices with negative entries.
  FiniteKernel kernel() const;
};

struct TaskConfig {
  std::size_t n = 100;
  std::size_t depth = 4;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;
  double tol = kTol;
  std::vector<std::string> checks;
  std::vector<std::size_t> data;
  std::optional<std::size_t> levels;
  double epsilon = 1e-8;
  // q_n of the c.i.d. recursion: "balanced" or a constant in [0, 1].
  std::optional<std::string> recursion;
  std::vector<double> test_sets = {-1.0, 0.0, 1.0};
  std::size_t samples = 10000;
  std::size_t inner = 20;
};

struct OutputConfig {
  std::optional<std::string> directory;
  bool json = true;
  bool csv = true;
};

struct ExperimentConfig {
  std::string schema_version;
  ModelConfig model;
  TaskConfig task;
  OutputConfig output;
};

// Validates and converts a parsed document. Violations throw kConfigInvalid
// with the JSON pointer of the offending value in the message.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> depth;
};

inline constexpr int kExitPassed = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInvalid = 2;

struct RunResult {
  int exit_code = kExitInvalid;
  ErrorCode error = ErrorCode::kOk;  // set when exit_code is kExitInvalid
  std::string output_directory;
  std::vector<std::string> files;
  std::string message;
};

const std::vector<std::string>& subcommands();

// Runs one subcommand. Never throws for bad input: invalid configs and
// violated preconditions give exit code 2 with a message in `log`.
RunResult run(const std::string& subcommand, const std::string& config_path,
              const RunOverrides& overrides, std::ostream& log);

}  // namespace mvps

#endif  // MVPS_EXPERIMENT_HPP_
