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

/* C interface to the MVPS library. All objects are opaque handles owned by
 * the caller and released with the matching *_free function. Every function
 * returning mvps_status sets a thread-local message readable through
 * mvps_last_error(). Arrays are row-major; state indices are 0-based. */

#ifndef MVPS_MVPS_H_
#define MVPS_MVPS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MVPS_API __declspec(dllexport)
#elif defined(__GNUC__)
#define MVPS_API __attribute__((visibility("default")))
#else
#define MVPS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mvps_status {
  MVPS_OK = 0,
  MVPS_INVALID_ARGUMENT = 1,
  MVPS_ZERO_MASS = 2,
  MVPS_SPACE_MISMATCH = 3,
  MVPS_BAD_COEFFICIENTS = 4,
  MVPS_EMPTY_POSITIVE_PART = 5,
  MVPS_POSITIVE_SUPPORT_REQUIRED = 6,
  MVPS_BAD_PARTITION = 7,
  MVPS_BAD_NULL_SET = 8,
  MVPS_SAMPLER_FAILURE = 9,
  MVPS_FINITE_ONLY = 10,
  MVPS_BAD_Q = 11,
  MVPS_TOO_LARGE = 12,
  MVPS_HYPOTHESIS_VIOLATED = 13,
  MVPS_NEGATIVE_ENTRIES = 14,
  MVPS_CONFIG_INVALID = 15,
  MVPS_IO = 16,
  MVPS_INTERNAL = 99
} mvps_status;

typedef struct mvps_space mvps_space;
typedef struct mvps_kernel mvps_kernel;
typedef struct mvps_partition mvps_partition;
typedef struct mvps_spec mvps_spec;
typedef struct mvps_report mvps_report;

MVPS_API const char* mvps_version(void);
MVPS_API const char* mvps_status_name(mvps_status status);
/* Message of the last failing call on this thread; "" after a success. */
MVPS_API const char* mvps_last_error(void);
/* Frees strings returned by the library. */
MVPS_API void mvps_string_free(char* s);

/* --- spaces and partitions --- */
/* labels may be NULL for "1".."k". */
MVPS_API mvps_status mvps_space_create(size_t k, const char* const* labels,
                                       mvps_space** out);
MVPS_API void mvps_space_free(mvps_space* space);
MVPS_API size_t mvps_space_size(const mvps_space* space);
MVPS_API const char* mvps_space_label(const mvps_space* space, size_t i);

/* block_of[x] is the block index of state x; indices must be 0..b-1. */
MVPS_API mvps_status mvps_partition_create(const mvps_space* space,
                                           const size_t* block_of,
                                           mvps_partition** out);
MVPS_API void mvps_partition_free(mvps_partition* partition);
MVPS_API size_t mvps_partition_num_blocks(const mvps_partition* partition);
MVPS_API size_t mvps_partition_block_of(const mvps_partition* partition,
                                        size_t x);

/* --- kernels --- */
MVPS_API mvps_status mvps_kernel_create(const mvps_space* space,
                                        const double* row_major,
                                        mvps_kernel** out);
MVPS_API mvps_status mvps_kernel_identity(const mvps_space* space,
                                          mvps_kernel** out);
MVPS_API mvps_status mvps_kernel_from_partition(const mvps_space* space,
                                                const double* nu,
                                                const mvps_partition* partition,
                                                const size_t* null_set,
                                                size_t null_count,
                                                mvps_kernel** out);
MVPS_API mvps_status mvps_kernel_canonicalize(const mvps_kernel* kernel,
                                              mvps_kernel** out);
MVPS_API void mvps_kernel_free(mvps_kernel* kernel);
MVPS_API size_t mvps_kernel_size(const mvps_kernel* kernel);
MVPS_API double mvps_kernel_entry(const mvps_kernel* kernel, size_t x,
                                  size_t y);
MVPS_API double mvps_kernel_mass(const mvps_kernel* kernel, size_t x);

/* Kernel checks. nu has mvps_kernel_size() entries. */
MVPS_API mvps_status mvps_check_balanced(const mvps_kernel* kernel,
                                         const double* nu, mvps_report** out);
MVPS_API mvps_status mvps_check_stationary(const mvps_kernel* kernel,
                                           const double* nu,
                                           mvps_report** out);
MVPS_API mvps_status mvps_check_self_averaging(const mvps_kernel* kernel,
                                               const double* nu,
                                               mvps_report** out);
MVPS_API mvps_status mvps_check_proper(const mvps_kernel* kernel,
                                       const double* nu,
                                       const mvps_partition* partition,
                                       mvps_report** out);
MVPS_API mvps_status mvps_detect_negative(const mvps_space* space,
                                          const double* row_major,
                                          mvps_report** out);
MVPS_API mvps_status mvps_atoms_of_kernel(const mvps_kernel* kernel,
                                          mvps_partition** out);
/* *partition is NULL when the decomposition fails; *null_block is
 * SIZE_MAX when there is no null block. */
MVPS_API mvps_status mvps_decompose_blocks(const mvps_kernel* kernel,
                                           const double* nu,
                                           mvps_report** report,
                                           mvps_partition** partition,
                                           size_t* null_block);

/* --- urn --- */
MVPS_API mvps_status mvps_spec_create(double theta, const double* nu,
                                      const mvps_kernel* kernel,
                                      mvps_spec** out);
MVPS_API void mvps_spec_free(mvps_spec* spec);
/* out has k entries: predictive after the given history. */
MVPS_API mvps_status mvps_predictive(const mvps_spec* spec,
                                     const size_t* history, size_t n,
                                     double* out);
/* draws has n entries. */
MVPS_API mvps_status mvps_simulate(const mvps_spec* spec, size_t n,
                                   uint64_t seed, uint64_t replicate,
                                   size_t* draws);

/* --- exact laws --- */
/* table has k^n entries, lexicographic in (x_1, ..., x_n). */
MVPS_API mvps_status mvps_joint_law(const mvps_spec* spec, size_t n,
                                    double* table, size_t table_size);
MVPS_API mvps_status mvps_check_exchangeable(const mvps_spec* spec, size_t n,
                                             double tol, mvps_report** out);
MVPS_API mvps_status mvps_check_cid(const mvps_spec* spec, size_t depth,
                                    double tol, mvps_report** out);
MVPS_API mvps_status mvps_check_cid_structure(const mvps_kernel* kernel,
                                              const double* nu,
                                              mvps_report** out);
MVPS_API mvps_status mvps_ps_joint_law(double theta, const double* nu,
                                       size_t k, const size_t* labels,
                                       size_t n, double* out);
/* Compares the projected block law with the Polya law over nu_pi, or with
 * the null-part reference when null_count > 0. */
MVPS_API mvps_status mvps_project_atoms(const mvps_spec* spec,
                                        const mvps_partition* partition,
                                        size_t n, const size_t* null_set,
                                        size_t null_count, mvps_report** out);

/* --- priors --- */
MVPS_API mvps_status mvps_truncation_level(double theta, double epsilon,
                                           size_t* levels,
                                           double* expected_residual);
/* measure has k entries (residual reassigned to the base). */
MVPS_API mvps_status mvps_sample_dp(double theta, const double* nu, size_t k,
                                    size_t levels, uint64_t seed,
                                    uint64_t replicate, double* measure);
MVPS_API mvps_status mvps_sample_kernel_sb(double theta, const double* nu,
                                           const mvps_kernel* kernel,
                                           size_t levels, uint64_t seed,
                                           uint64_t replicate,
                                           double* measure);
MVPS_API mvps_status mvps_sample_posterior(const mvps_spec* spec,
                                           const size_t* data, size_t n,
                                           size_t levels, uint64_t seed,
                                           uint64_t replicate,
                                           double* measure);
/* labels and samples have n entries each. */
MVPS_API mvps_status mvps_sample_hierarchical(
    double theta, const double* nu, const mvps_partition* partition, size_t n,
    size_t levels, uint64_t seed, uint64_t replicate, size_t* labels,
    size_t* samples);
/* labels[i] is SIZE_MAX when the draw came from the null part. */
MVPS_API mvps_status mvps_sample_null_mixture(
    double theta, const double* nu, const mvps_partition* partition,
    const size_t* null_set, size_t null_count, size_t n, uint64_t seed,
    uint64_t replicate, size_t* labels, size_t* samples);

/* --- reports --- */
MVPS_API void mvps_report_free(mvps_report* report);
MVPS_API int mvps_report_passed(const mvps_report* report);
MVPS_API double mvps_report_max_residual(const mvps_report* report);
MVPS_API double mvps_report_tolerance(const mvps_report* report);
/* JSON text, freed with mvps_string_free. */
MVPS_API mvps_status mvps_report_json(const mvps_report* report, char** out);

/* --- experiment runner --- */
typedef struct mvps_run_overrides {
  int has_seed;
  uint64_t seed;
  const char* out; /* NULL: not overridden */
  int has_tol;
  double tol;
  int has_replicates;
  size_t replicates;
  int has_depth;
  size_t depth;
} mvps_run_overrides;

MVPS_API size_t mvps_subcommand_count(void);
MVPS_API const char* mvps_subcommand_name(size_t i);
/* Runs one subcommand; *exit_code follows 0 passed / 1 failed / 2 invalid.
 * Diagnostics go to stderr. overrides may be NULL. Returns MVPS_OK whenever
 * the run completed, MVPS_CONFIG_INVALID etc. when exit_code is 2. */
MVPS_API mvps_status mvps_run(const char* subcommand, const char* config_path,
                              const mvps_run_overrides* overrides,
                              int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* MVPS_MVPS_H_ */
