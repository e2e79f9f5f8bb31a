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

#include "mvps/mvps.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mvps/error.hpp"
#include "mvps/exactlaw.hpp"
#include "mvps/experiment.hpp"
#include "mvps/kernel.hpp"
#include "mvps/prior.hpp"
#include "mvps/urn.hpp"

struct mvps_space {
  mvps::FiniteSpace value;
};
struct mvps_kernel {
  mvps::FiniteKernel value;
};
struct mvps_partition {
  mvps::Partition value;
};
struct mvps_spec {
  mvps::UrnSpec value;
};
struct mvps_report {
  mvps::CheckReport value;
};

namespace {

thread_local std::string g_last_error;

mvps_status Fail(mvps_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

// Runs body, translating exceptions into status codes.
template <class F>
mvps_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MVPS_OK;
  } catch (const mvps::Error& e) {
    return Fail(static_cast<mvps_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(MVPS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(MVPS_INTERNAL, e.what());
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw mvps::Error(mvps::ErrorCode::kInvalidArgument, what);
}

mvps::ProbabilityVector Nu(const mvps::FiniteSpace& space, const double* nu) {
  Require(nu != nullptr, "nu is null");
  return mvps::ProbabilityVector(space, std::vector<double>(nu, nu + space.size()));
}

std::vector<std::size_t> Indices(const std::size_t* p, std::size_t n) {
  Require(p != nullptr || n == 0, "index array is null");
  return std::vector<std::size_t>(p, p + n);
}

mvps_report* Wrap(mvps::CheckReport r) { return new mvps_report{std::move(r)}; }

void CopyOut(std::span<const double> w, double* out) {
  Require(out != nullptr, "output array is null");
  std::copy(w.begin(), w.end(), out);
}

}  // namespace

extern "C" {

const char* mvps_version(void) { return "1.0.0"; }

const char* mvps_status_name(mvps_status status) {
  if (status == MVPS_INTERNAL) return "Internal";
  if (status < MVPS_OK || status > MVPS_IO) return "Unknown";
  return mvps::ErrorCodeName(static_cast<mvps::ErrorCode>(status));
}

const char* mvps_last_error(void) { return g_last_error.c_str(); }

void mvps_string_free(char* s) { std::free(s); }

mvps_status mvps_space_create(size_t k, const char* const* labels,
                              mvps_space** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    if (labels == nullptr) {
      *out = new mvps_space{mvps::FiniteSpace::Numbered(k)};
      return;
    }
    std::vector<std::string> l;
    for (size_t i = 0; i < k; ++i) {
      Require(labels[i] != nullptr, "label is null");
      l.emplace_back(labels[i]);
    }
    *out = new mvps_space{mvps::FiniteSpace(std::move(l))};
  });
}

void mvps_space_free(mvps_space* space) { delete space; }
size_t mvps_space_size(const mvps_space* space) {
  return space ? space->value.size() : 0;
}
const char* mvps_space_label(const mvps_space* space, size_t i) {
  if (!space || i >= space->value.size()) return nullptr;
  return space->value.label(i).c_str();
}

mvps_status mvps_partition_create(const mvps_space* space, const size_t* block_of,
                                  mvps_partition** out) {
  return Guard([&] {
    Require(space && block_of && out, "null argument");
    *out = new mvps_partition{mvps::Partition::FromBlockOf(
        space->value, std::span<const size_t>(block_of, space->value.size()))};
  });
}
void mvps_partition_free(mvps_partition* partition) { delete partition; }
size_t mvps_partition_num_blocks(const mvps_partition* partition) {
  return partition ? partition->value.num_blocks() : 0;
}
size_t mvps_partition_block_of(const mvps_partition* partition, size_t x) {
  if (!partition || x >= partition->value.space().size()) return SIZE_MAX;
  return partition->value.block_of(x);
}

mvps_status mvps_kernel_create(const mvps_space* space, const double* row_major,
                               mvps_kernel** out) {
  return Guard([&] {
    Require(space && row_major && out, "null argument");
    const size_t k = space->value.size();
    std::vector<double> m(row_major, row_major + k * k);
    for (double v : m) {
      if (v < -mvps::kTol) {
        throw mvps::Error(mvps::ErrorCode::kNegativeEntries,
                          "kernel matrix has negative entries");
      }
    }
    *out = new mvps_kernel{mvps::FiniteKernel(space->value, std::move(m))};
  });
}
mvps_status mvps_kernel_identity(const mvps_space* space, mvps_kernel** out) {
  return Guard([&] {
    Require(space && out, "null argument");
    *out = new mvps_kernel{mvps::FiniteKernel::Identity(space->value)};
  });
}
mvps_status mvps_kernel_from_partition(const mvps_space* space, const double* nu,
                                       const mvps_partition* partition,
                                       const size_t* null_set, size_t null_count,
                                       mvps_kernel** out) {
  return Guard([&] {
    Require(space && partition && out, "null argument");
    const auto z = Indices(null_set, null_count);
    *out = new mvps_kernel{mvps::exchangeable_kernel_from_partition(
        Nu(space->value, nu), partition->value, z)};
  });
}
mvps_status mvps_kernel_canonicalize(const mvps_kernel* kernel, mvps_kernel** out) {
  return Guard([&] {
    Require(kernel && out, "null argument");
    *out = new mvps_kernel{mvps::canonicalize(kernel->value)};
  });
}
void mvps_kernel_free(mvps_kernel* kernel) { delete kernel; }
size_t mvps_kernel_size(const mvps_kernel* kernel) {
  return kernel ? kernel->value.size() : 0;
}
double mvps_kernel_entry(const mvps_kernel* kernel, size_t x, size_t y) {
  if (!kernel || x >= kernel->value.size() || y >= kernel->value.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return kernel->value(x, y);
}
double mvps_kernel_mass(const mvps_kernel* kernel, size_t x) {
  if (!kernel || x >= kernel->value.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return kernel->value.mass(x);
}

#define MVPS_KERNEL_CHECK(fn, impl)                                          \
  mvps_status fn(const mvps_kernel* kernel, const double* nu,                \
                 mvps_report** out) {                                        \
    return Guard([&] {                                                       \
      Require(kernel && out, "null argument");                               \
      *out = Wrap(impl(kernel->value, Nu(kernel->value.space(), nu)));       \
    });                                                                      \
  }
MVPS_KERNEL_CHECK(mvps_check_balanced, mvps::check_balanced)
MVPS_KERNEL_CHECK(mvps_check_stationary, mvps::check_scaled_stationarity)
MVPS_KERNEL_CHECK(mvps_check_self_averaging, mvps::check_self_averaging)
MVPS_KERNEL_CHECK(mvps_check_cid_structure, mvps::check_cid_structure)
#undef MVPS_KERNEL_CHECK

mvps_status mvps_check_proper(const mvps_kernel* kernel, const double* nu,
                              const mvps_partition* partition, mvps_report** out) {
  return Guard([&] {
    Require(kernel && partition && out, "null argument");
    *out = Wrap(mvps::check_proper(kernel->value, Nu(kernel->value.space(), nu),
                                   partition->value));
  });
}
mvps_status mvps_detect_negative(const mvps_space* space, const double* row_major,
                                 mvps_report** out) {
  return Guard([&] {
    Require(space && row_major && out, "null argument");
    const size_t k = space->value.size();
    *out = Wrap(mvps::detect_negative(space->value,
                                      std::span<const double>(row_major, k * k)));
  });
}
mvps_status mvps_atoms_of_kernel(const mvps_kernel* kernel, mvps_partition** out) {
  return Guard([&] {
    Require(kernel && out, "null argument");
    *out = new mvps_partition{mvps::atoms_of_kernel(kernel->value)};
  });
}
mvps_status mvps_decompose_blocks(const mvps_kernel* kernel, const double* nu,
                                  mvps_report** report, mvps_partition** partition,
                                  size_t* null_block) {
  return Guard([&] {
    Require(kernel && report && partition && null_block, "null argument");
    mvps::Decomposition d =
        mvps::decompose_blocks(kernel->value, Nu(kernel->value.space(), nu));
    *partition = d.partition ? new mvps_partition{std::move(*d.partition)} : nullptr;
    *null_block = d.null_block.value_or(SIZE_MAX);
    *report = Wrap(std::move(d.report));
  });
}

mvps_status mvps_spec_create(double theta, const double* nu,
                             const mvps_kernel* kernel, mvps_spec** out) {
  return Guard([&] {
    Require(kernel && out, "null argument");
    *out = new mvps_spec{
        mvps::UrnSpec(theta, Nu(kernel->value.space(), nu), kernel->value)};
  });
}
void mvps_spec_free(mvps_spec* spec) { delete spec; }

mvps_status mvps_predictive(const mvps_spec* spec, const size_t* history, size_t n,
                            double* out) {
  return Guard([&] {
    Require(spec != nullptr, "null argument");
    const auto h = Indices(history, n);
    CopyOut(mvps::predictive(mvps::replay(spec->value, h)).weights(), out);
  });
}
mvps_status mvps_simulate(const mvps_spec* spec, size_t n, uint64_t seed,
                          uint64_t replicate, size_t* draws) {
  return Guard([&] {
    Require(spec && (draws || n == 0), "null argument");
    const mvps::Trajectory t = mvps::simulate(spec->value, n, seed, replicate);
    std::copy(t.draws.begin(), t.draws.end(), draws);
  });
}

mvps_status mvps_joint_law(const mvps_spec* spec, size_t n, double* table,
                           size_t table_size) {
  return Guard([&] {
    Require(spec && table, "null argument");
    const mvps::JointLaw law = mvps::joint_law(spec->value, n);
    Require(table_size == law.size(), "table_size must equal k^n");
    CopyOut(law.table(), table);
  });
}
mvps_status mvps_check_exchangeable(const mvps_spec* spec, size_t n, double tol,
                                    mvps_report** out) {
  return Guard([&] {
    Require(spec && out, "null argument");
    *out = Wrap(mvps::check_exchangeable(spec->value, n, tol));
  });
}
mvps_status mvps_check_cid(const mvps_spec* spec, size_t depth, double tol,
                           mvps_report** out) {
  return Guard([&] {
    Require(spec && out, "null argument");
    *out = Wrap(mvps::check_cid(spec->value, depth, tol));
  });
}
mvps_status mvps_ps_joint_law(double theta, const double* nu, size_t k,
                              const size_t* labels, size_t n, double* out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    const auto l = Indices(labels, n);
    *out = mvps::ps_joint_law(theta, Nu(mvps::FiniteSpace::Numbered(k), nu), l);
  });
}
mvps_status mvps_project_atoms(const mvps_spec* spec, const mvps_partition* partition,
                               size_t n, const size_t* null_set, size_t null_count,
                               mvps_report** out) {
  return Guard([&] {
    Require(spec && partition && out, "null argument");
    const auto z = Indices(null_set, null_count);
    const mvps::UrnSpec& s = spec->value;
    mvps::Projection p =
        z.empty() ? mvps::project_atoms_law(s, partition->value, n)
                  : mvps::project_atoms_law(
                        s, partition->value, n,
                        mvps::null_projection_spec(s.theta, s.nu, partition->value, z));
    *out = Wrap(std::move(p.report));
  });
}

mvps_status mvps_truncation_level(double theta, double epsilon, size_t* levels,
                                  double* expected_residual) {
  return Guard([&] {
    Require(levels != nullptr, "null argument");
    const mvps::Truncation t = mvps::truncation_level(theta, epsilon);
    *levels = t.levels;
    if (expected_residual) *expected_residual = t.expected_residual;
  });
}
mvps_status mvps_sample_dp(double theta, const double* nu, size_t k, size_t levels,
                           uint64_t seed, uint64_t replicate, double* measure) {
  return Guard([&] {
    const auto p = Nu(mvps::FiniteSpace::Numbered(k), nu);
    const auto d = mvps::realize_dp(mvps::sample_dp(theta, p, levels, seed, replicate),
                                    p, mvps::ResidualMode::kReassignToBase);
    CopyOut(d.measure.weights(), measure);
  });
}
mvps_status mvps_sample_kernel_sb(double theta, const double* nu,
                                  const mvps_kernel* kernel, size_t levels,
                                  uint64_t seed, uint64_t replicate, double* measure) {
  return Guard([&] {
    Require(kernel != nullptr, "null argument");
    const auto d = mvps::sample_kernel_sb(theta, Nu(kernel->value.space(), nu),
                                          kernel->value, levels, seed, replicate);
    CopyOut(d.measure.weights(), measure);
  });
}
mvps_status mvps_sample_posterior(const mvps_spec* spec, const size_t* data, size_t n,
                                  size_t levels, uint64_t seed, uint64_t replicate,
                                  double* measure) {
  return Guard([&] {
    Require(spec != nullptr, "null argument");
    const auto x = Indices(data, n);
    const mvps::UrnSpec& s = spec->value;
    const auto d = mvps::sample_posterior(s.theta, s.nu, s.kernel, x, levels, seed,
                                          replicate);
    CopyOut(d.measure.weights(), measure);
  });
}
mvps_status mvps_sample_hierarchical(double theta, const double* nu,
                                     const mvps_partition* partition, size_t n,
                                     size_t levels, uint64_t seed, uint64_t replicate,
                                     size_t* labels, size_t* samples) {
  return Guard([&] {
    Require(partition && ((labels && samples) || n == 0), "null argument");
    const auto& p = partition->value;
    const auto s = mvps::sample_hierarchical(theta, Nu(p.space(), nu), p, n, levels,
                                             seed, replicate);
    std::copy(s.labels.begin(), s.labels.end(), labels);
    std::copy(s.samples.begin(), s.samples.end(), samples);
  });
}
mvps_status mvps_sample_null_mixture(double theta, const double* nu,
                                     const mvps_partition* partition,
                                     const size_t* null_set, size_t null_count,
                                     size_t n, uint64_t seed, uint64_t replicate,
                                     size_t* labels, size_t* samples) {
  return Guard([&] {
    Require(partition && ((labels && samples) || n == 0), "null argument");
    const auto& p = partition->value;
    const auto z = Indices(null_set, null_count);
    const auto s = mvps::sample_null_mixture(theta, Nu(p.space(), nu), p, z, n, seed,
                                             replicate);
    std::copy(s.labels.begin(), s.labels.end(), labels);
    std::copy(s.samples.begin(), s.samples.end(), samples);
  });
}

void mvps_report_free(mvps_report* report) { delete report; }
int mvps_report_passed(const mvps_report* report) {
  return report && report->value.passed ? 1 : 0;
}
double mvps_report_max_residual(const mvps_report* report) {
  return report ? report->value.max_residual
                : std::numeric_limits<double>::quiet_NaN();
}
double mvps_report_tolerance(const mvps_report* report) {
  return report ? report->value.tolerance : std::numeric_limits<double>::quiet_NaN();
}
mvps_status mvps_report_json(const mvps_report* report, char** out) {
  return Guard([&] {
    Require(report && out, "null argument");
    const std::string s = report->value.to_json().dump();
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
  });
}

size_t mvps_subcommand_count(void) { return mvps::subcommands().size(); }
const char* mvps_subcommand_name(size_t i) {
  const auto& s = mvps::subcommands();
  return i < s.size() ? s[i].c_str() : nullptr;
}

mvps_status mvps_run(const char* subcommand, const char* config_path,
                     const mvps_run_overrides* overrides, int* exit_code) {
  if (!subcommand || !config_path || !exit_code) {
    if (exit_code) *exit_code = mvps::kExitInvalid;
    return Fail(MVPS_INVALID_ARGUMENT, "null argument");
  }
  mvps::RunOverrides o;
  if (overrides) {
    if (overrides->has_seed) o.seed = overrides->seed;
    if (overrides->out) o.out = std::string(overrides->out);
    if (overrides->has_tol) o.tol = overrides->tol;
    if (overrides->has_replicates) o.replicates = overrides->replicates;
    if (overrides->has_depth) o.depth = overrides->depth;
  }
  mvps::RunResult r;
  try {
    r = mvps::run(subcommand, config_path, o, std::cerr);
  } catch (const std::exception& e) {
    *exit_code = mvps::kExitInvalid;
    return Fail(MVPS_INTERNAL, e.what());
  }
  *exit_code = r.exit_code;
  if (r.exit_code != mvps::kExitInvalid) {
    g_last_error.clear();
    return MVPS_OK;
  }
  const auto status = r.error == mvps::ErrorCode::kOk
                          ? MVPS_INTERNAL
                          : static_cast<mvps_status>(r.error);
  return Fail(status, r.message);
}

}  // extern "C"
