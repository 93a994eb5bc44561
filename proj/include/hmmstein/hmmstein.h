// Copyright 2026 The hmmstein Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HMMSTEIN_HMMSTEIN_H_
#define HMMSTEIN_HMMSTEIN_H_

/* C interface to the hmmstein library. Objects are opaque handles released by
 * their *_free function; every fallible call returns an hs_status and, on
 * failure, leaves a message for hs_last_error() on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(HMMSTEIN_BUILDING_LIBRARY)
#define HS_API __attribute__((visibility("default")))
#else
#define HS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hs_status {
  HS_OK = 0,
  HS_NON_STOCHASTIC_ROW,
  HS_NEGATIVE_ENTRY,
  HS_BAD_DIMENSIONS,
  HS_NOT_MIXING,
  HS_LENGTH_MISMATCH,
  HS_INDEX_OUT_OF_RANGE,
  HS_INDEX_IN_A,
  HS_INSUFFICIENT_SAMPLES,
  HS_ZERO_VARIANCE,
  HS_EMPTY_SAMPLE,
  HS_NON_POSITIVE_SD,
  HS_TOO_FEW_POINTS,
  HS_NON_POSITIVE_VALUE,
  HS_STATE_MISMATCH,
  HS_EMPTY_NUCLEI,
  HS_SYMBOL_OUT_OF_RANGE,
  HS_CONFIG_PARSE,
  HS_UNKNOWN_FUNCTIONAL,
  HS_MISSING_RUN,
  HS_INVALID_ARGUMENT,
  HS_IO,
  HS_NULL_ARGUMENT,
  HS_INTERNAL
} hs_status;

typedef struct hs_spec hs_spec;
typedef struct hs_stack hs_stack;

HS_API const char* hs_version(void);
/* Message of the last failure on this thread, "" if none. */
HS_API const char* hs_last_error(void);
HS_API const char* hs_status_name(hs_status status);

/* Models. P is row-major states x states, Q row-major states x symbols. */
HS_API hs_status hs_spec_create(size_t states, size_t symbols, const double* mu, const double* P,
                                const double* Q, hs_spec** out);
HS_API hs_status hs_spec_from_json(const char* text, hs_spec** out);
/* *out must be released with hs_string_free. */
HS_API hs_status hs_spec_to_json(const hs_spec* spec, char** out);
HS_API void hs_string_free(char* text);
HS_API void hs_spec_free(hs_spec* spec);
HS_API size_t hs_spec_states(const hs_spec* spec);
HS_API size_t hs_spec_symbols(const hs_spec* spec);
/* k_max = 0 selects the default search depth. */
HS_API hs_status hs_spec_mixing_constants(const hs_spec* spec, size_t k_max, size_t* K,
                                          double* epsilon);
/* out has room for hs_spec_states(spec) values. */
HS_API hs_status hs_spec_stationary(const hs_spec* spec, double* out);

/* Instruction stacks of length |S|(n-1)+1 drawn from a 64-bit seed. */
HS_API hs_status hs_stack_sample(const hs_spec* spec, size_t n, uint64_t seed, hs_stack** out);
HS_API size_t hs_stack_size(const hs_stack* stack);
HS_API size_t hs_stack_length(const hs_stack* stack);
HS_API hs_status hs_stack_entry(const hs_stack* stack, size_t index, uint32_t* state,
                                uint32_t* symbol);
/* hidden and observed have room for hs_stack_length(stack) values. */
HS_API hs_status hs_stack_reconstruct(const hs_stack* stack, uint32_t* hidden, uint32_t* observed);
/* Copy of stack with the listed entries taken from fresh. */
HS_API hs_status hs_stack_perturb(const hs_stack* stack, const size_t* indices, size_t count,
                                  const hs_stack* fresh, hs_stack** out);
/* *infinite is set to 1 when the chains never meet again. */
HS_API hs_status hs_coupling_length(const hs_stack* stack, size_t index, const hs_stack* fresh,
                                    size_t* steps, int* infinite);
HS_API void hs_stack_free(hs_stack* stack);

/* Statistics and application kernels. */
HS_API hs_status hs_empirical_kolmogorov(const double* samples, size_t count, double mean,
                                         double sd, double* out);
HS_API hs_status hs_occupancy_count(const uint32_t* symbols, size_t count, size_t letters,
                                    size_t* out);
/* phi for nuclei in [0,1] and K = [lo, hi]. */
HS_API hs_status hs_voronoi_exact_1d(const double* nuclei, size_t count, double lo, double hi,
                                     double* out);

/* Experiments. Paths name a config or a run manifest. */
HS_API hs_status hs_config_validate(const char* path);
HS_API hs_status hs_experiment_run(const char* path);
/* *csv_out must be released with hs_string_free. */
HS_API hs_status hs_compare_runs(const char* run_a, const char* run_b, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* HMMSTEIN_HMMSTEIN_H_ */
