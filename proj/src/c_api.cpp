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

#include "hmmstein/hmmstein.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "hmmstein/error.hpp"
#include "hmmstein/experiments.hpp"
#include "hmmstein/hmm.hpp"
#include "hmmstein/occupancy.hpp"
#include "hmmstein/stats.hpp"
#include "hmmstein/voronoi.hpp"

struct hs_spec {
  hmmstein::HmmSpec spec;
};

struct hs_stack {
  hmmstein::InstructionStack stack;
};

namespace {

thread_local std::string last_error;

hs_status to_status(hmmstein::ErrorCode code) {
  // The C enum lists the codes in the same order, shifted by one for HS_OK.
  return static_cast<hs_status>(static_cast<int>(code) + 1);
}

hs_status fail_with(hs_status status, const char* message) {
  last_error = message;
  return status;
}

template <typename Body>
hs_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return HS_OK;
  } catch (const hmmstein::Error& e) {
    return fail_with(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(HS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(HS_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

#define HS_REQUIRE(cond)                                          \
  do {                                                            \
    if (!(cond)) return fail_with(HS_NULL_ARGUMENT, #cond " is null"); \
  } while (0)

extern "C" {

const char* hs_version(void) { return HMMSTEIN_VERSION; }

const char* hs_last_error(void) { return last_error.c_str(); }

const char* hs_status_name(hs_status status) {
  switch (status) {
    case HS_OK: return "Ok";
    case HS_NULL_ARGUMENT: return "NullArgument";
    case HS_INTERNAL: return "Internal";
    default: break;
  }
  if (status > HS_OK && status < HS_NULL_ARGUMENT)
    return hmmstein::error_code_name(static_cast<hmmstein::ErrorCode>(status - 1)).data();
  return "Unknown";
}

hs_status hs_spec_create(size_t states, size_t symbols, const double* mu, const double* P,
                         const double* Q, hs_spec** out) {
  HS_REQUIRE(mu && P && Q && out);
  *out = nullptr;
  return guarded([&] {
    hmmstein::HmmSpec s;
    s.num_states = states;
    s.num_symbols = symbols;
    s.initial.assign(mu, mu + states);
    s.transition = hmmstein::Matrix(states, states);
    s.emission = hmmstein::Matrix(states, symbols);
    for (size_t r = 0; r < states; ++r) {
      for (size_t c = 0; c < states; ++c) s.transition(r, c) = P[r * states + c];
      for (size_t c = 0; c < symbols; ++c) s.emission(r, c) = Q[r * symbols + c];
    }
    hmmstein::validate_spec(s);
    *out = new hs_spec{std::move(s)};
  });
}

hs_status hs_spec_from_json(const char* text, hs_spec** out) {
  HS_REQUIRE(text && out);
  *out = nullptr;
  return guarded([&] { *out = new hs_spec{hmmstein::parse_spec_json(text)}; });
}

hs_status hs_spec_to_json(const hs_spec* spec, char** out) {
  HS_REQUIRE(spec && out);
  *out = nullptr;
  return guarded([&] { *out = copy_string(hmmstein::spec_to_json(spec->spec)); });
}

void hs_string_free(char* text) { std::free(text); }

void hs_spec_free(hs_spec* spec) { delete spec; }

size_t hs_spec_states(const hs_spec* spec) { return spec ? spec->spec.num_states : 0; }

size_t hs_spec_symbols(const hs_spec* spec) { return spec ? spec->spec.num_symbols : 0; }

hs_status hs_spec_mixing_constants(const hs_spec* spec, size_t k_max, size_t* K, double* epsilon) {
  HS_REQUIRE(spec && K && epsilon);
  return guarded([&] {
    const auto m = hmmstein::mixing_constants(
        spec->spec, k_max ? k_max : hmmstein::default_k_max(spec->spec));
    *K = m.K;
    *epsilon = m.epsilon;
  });
}

hs_status hs_spec_stationary(const hs_spec* spec, double* out) {
  HS_REQUIRE(spec && out);
  return guarded([&] {
    const auto pi = hmmstein::stationary_distribution(spec->spec.transition);
    std::copy(pi.begin(), pi.end(), out);
  });
}

hs_status hs_stack_sample(const hs_spec* spec, size_t n, uint64_t seed, hs_stack** out) {
  HS_REQUIRE(spec && out);
  *out = nullptr;
  return guarded([&] {
    hmmstein::Rng rng = hmmstein::Seed(seed).rng();
    *out = new hs_stack{hmmstein::sample_instructions(spec->spec, n, rng)};
  });
}

size_t hs_stack_size(const hs_stack* stack) { return stack ? stack->stack.size() : 0; }

size_t hs_stack_length(const hs_stack* stack) { return stack ? stack->stack.n : 0; }

hs_status hs_stack_entry(const hs_stack* stack, size_t index, uint32_t* state, uint32_t* symbol) {
  HS_REQUIRE(stack && state && symbol);
  if (index >= stack->stack.size())
    return fail_with(HS_INDEX_OUT_OF_RANGE, "stack index out of range");
  *state = stack->stack.entries[index].state;
  *symbol = stack->stack.entries[index].symbol;
  last_error.clear();
  return HS_OK;
}

hs_status hs_stack_reconstruct(const hs_stack* stack, uint32_t* hidden, uint32_t* observed) {
  HS_REQUIRE(stack && hidden && observed);
  return guarded([&] {
    const auto t = hmmstein::reconstruct(stack->stack);
    std::copy(t.hidden.begin(), t.hidden.end(), hidden);
    std::copy(t.observed.begin(), t.observed.end(), observed);
  });
}

hs_status hs_stack_perturb(const hs_stack* stack, const size_t* indices, size_t count,
                           const hs_stack* fresh, hs_stack** out) {
  HS_REQUIRE(stack && fresh && out && (indices || count == 0));
  *out = nullptr;
  return guarded([&] {
    auto A = hmmstein::PerturbationSet::from_unsorted(
        std::vector<std::size_t>(indices, indices + count));
    *out = new hs_stack{hmmstein::perturb(stack->stack, A, fresh->stack)};
  });
}

hs_status hs_coupling_length(const hs_stack* stack, size_t index, const hs_stack* fresh,
                             size_t* steps, int* infinite) {
  HS_REQUIRE(stack && fresh && steps && infinite);
  return guarded([&] {
    if (fresh->stack.size() != stack->stack.size())
      hmmstein::fail(hmmstein::ErrorCode::LengthMismatch, "stacks differ in length");
    const auto s = hmmstein::coupling_length(stack->stack, index, fresh->stack);
    *infinite = s.is_infinite() ? 1 : 0;
    *steps = s.is_infinite() ? 0 : s.steps();
  });
}

void hs_stack_free(hs_stack* stack) { delete stack; }

hs_status hs_empirical_kolmogorov(const double* samples, size_t count, double mean, double sd,
                                  double* out) {
  HS_REQUIRE(out && (samples || count == 0));
  return guarded([&] {
    *out = hmmstein::empirical_kolmogorov(std::span<const double>(samples, count), mean, sd);
  });
}

hs_status hs_occupancy_count(const uint32_t* symbols, size_t count, size_t letters, size_t* out) {
  HS_REQUIRE(out && (symbols || count == 0));
  return guarded([&] {
    *out = hmmstein::occupancy::occupancy_count(std::span<const uint32_t>(symbols, count), letters);
  });
}

hs_status hs_voronoi_exact_1d(const double* nuclei, size_t count, double lo, double hi,
                              double* out) {
  HS_REQUIRE(out && (nuclei || count == 0));
  return guarded([&] {
    const auto K = hmmstein::voronoi::RegionPredicate::box({lo}, {hi});
    *out = hmmstein::voronoi::voronoi_volume_exact_1d(std::span<const double>(nuclei, count), K);
  });
}

hs_status hs_config_validate(const char* path) {
  HS_REQUIRE(path);
  return guarded([&] { hmmstein::experiments::validate(hmmstein::experiments::load_config(path)); });
}

hs_status hs_experiment_run(const char* path) {
  HS_REQUIRE(path);
  return guarded([&] { hmmstein::experiments::run(hmmstein::experiments::load_config(path)); });
}

hs_status hs_compare_runs(const char* run_a, const char* run_b, char** csv_out) {
  HS_REQUIRE(run_a && run_b && csv_out);
  *csv_out = nullptr;
  return guarded([&] {
    *csv_out = copy_string(hmmstein::experiments::compare_csv(
        hmmstein::experiments::compare_runs(run_a, run_b)));
  });
}

}  // extern "C"
