/* Copyright 2026 The hmmstein Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Exercises the C interface from plain C. Exit status 0 on success. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "hmmstein/hmmstein.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  const double mu[2] = {0.5, 0.5};
  const double P[4] = {0.9, 0.1, 0.2, 0.8};
  const double Q[4] = {0.7, 0.3, 0.2, 0.8};
  const double bad[4] = {0.9, 0.2, 0.2, 0.8};
  hs_spec* spec = NULL;
  hs_spec* copy = NULL;
  hs_stack* a = NULL;
  hs_stack* b = NULL;
  hs_stack* mixed = NULL;
  char* text = NULL;
  size_t K = 0, steps = 0, count = 0, i;
  double eps = 0.0, pi[2], value = 0.0;
  uint32_t hidden[16], observed[16], st, sy;
  int infinite = 0;
  const size_t all_but_first[1] = {3};
  const double samples[1] = {0.0};
  const uint32_t letters[4] = {0, 2, 2, 0};
  const double nuclei[2] = {0.75, 0.25};

  EXPECT(strlen(hs_version()) > 0);
  EXPECT(hs_spec_create(2, 2, mu, bad, Q, &spec) == HS_NON_STOCHASTIC_ROW);
  EXPECT(strlen(hs_last_error()) > 0);
  EXPECT(strcmp(hs_status_name(HS_NON_STOCHASTIC_ROW), "NonStochasticRow") == 0);
  EXPECT(hs_spec_create(2, 2, mu, P, Q, NULL) == HS_NULL_ARGUMENT);
  EXPECT(hs_spec_create(2, 2, mu, P, Q, &spec) == HS_OK);
  EXPECT(hs_spec_states(spec) == 2 && hs_spec_symbols(spec) == 2);

  EXPECT(hs_spec_to_json(spec, &text) == HS_OK);
  EXPECT(hs_spec_from_json(text, &copy) == HS_OK);
  hs_string_free(text);
  EXPECT(hs_spec_states(copy) == 2);
  hs_spec_free(copy);
  EXPECT(hs_spec_from_json("{", &copy) == HS_CONFIG_PARSE);

  EXPECT(hs_spec_mixing_constants(spec, 0, &K, &eps) == HS_OK);
  EXPECT(K == 1 && fabs(eps - 0.1) < 1e-12);
  EXPECT(hs_spec_stationary(spec, pi) == HS_OK);
  EXPECT(fabs(pi[0] - 2.0 / 3.0) < 1e-9);

  EXPECT(hs_stack_sample(spec, 16, 42, &a) == HS_OK);
  EXPECT(hs_stack_sample(spec, 16, 43, &b) == HS_OK);
  EXPECT(hs_stack_size(a) == 2 * 15 + 1);
  EXPECT(hs_stack_length(a) == 16);
  EXPECT(hs_stack_entry(a, 0, &st, &sy) == HS_OK);
  EXPECT(st < 2 && sy < 2);
  EXPECT(hs_stack_entry(a, 31, &st, &sy) == HS_INDEX_OUT_OF_RANGE);
  EXPECT(hs_stack_reconstruct(a, hidden, observed) == HS_OK);
  EXPECT(hs_stack_perturb(a, all_but_first, 1, b, &mixed) == HS_OK);
  EXPECT(hs_coupling_length(a, 3, b, &steps, &infinite) == HS_OK);
  EXPECT(infinite == 0);
  hs_stack_free(mixed);
  hs_stack_free(a);
  hs_stack_free(b);
  hs_spec_free(spec);

  EXPECT(hs_empirical_kolmogorov(samples, 1, 0.0, 1.0, &value) == HS_OK);
  EXPECT(fabs(value - 0.5) < 1e-15);
  EXPECT(hs_empirical_kolmogorov(samples, 0, 0.0, 1.0, &value) == HS_EMPTY_SAMPLE);
  EXPECT(hs_occupancy_count(letters, 4, 4, &count) == HS_OK && count == 2);
  EXPECT(hs_occupancy_count(letters, 4, 2, &count) == HS_SYMBOL_OUT_OF_RANGE);
  EXPECT(hs_voronoi_exact_1d(nuclei, 2, 0.0, 0.5, &value) == HS_OK);
  EXPECT(fabs(value - 0.5) < 1e-12);

  EXPECT(hs_config_validate("/nonexistent/config.json") == HS_IO);
  for (i = 0; i < 16; ++i) EXPECT(hidden[i] < 2 && observed[i] < 2);

  if (failures) fprintf(stderr, "%d failures\n", failures);
  return failures ? EXIT_FAILURE : EXIT_SUCCESS;
}
