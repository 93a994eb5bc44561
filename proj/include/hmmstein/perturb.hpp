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

#ifndef HMMSTEIN_PERTURB_HPP_
#define HMMSTEIN_PERTURB_HPP_

// Difference operators on instruction stacks and Monte Carlo estimators of
// the terms in the Wasserstein / Kolmogorov normal-approximation bounds.
//
// For a stack R of m instructions, an independent copy R' and A a subset of
// {0..m-1}, R^A takes the entries in A from R'. Then
//   Delta_j h(R^A) = h(R^A) - h(R^{A u {j}}),
//   T_A  = sum_{j not in A} Delta_j h(R) Delta_j h(R^A),
//   T_m  = sum_{A proper subset} k_{m,A} T_A,  k_{m,A} = 1 / (C(m,|A|) (m-|A|)),
// and T'_m is the same with |Delta_j h(R^A)|.

#include <cstddef>
#include <vector>

#include "hmmstein/functional.hpp"
#include "hmmstein/hmm.hpp"
#include "hmmstein/random.hpp"
#include "hmmstein/stats.hpp"

namespace hmmstein {

// h(R) - h(R^{i}).
double delta(const Functional& f, const InstructionStack& stack, std::size_t i,
             const InstructionStack& fresh);

// h(R^A) - h(R^{A u {i}}). Throws IndexInA when i is already in A.
double delta_A(const Functional& f, const InstructionStack& stack, const PerturbationSet& A,
               std::size_t i, const InstructionStack& fresh);

enum class TermKind { Plain, Absolute };

// One point (A, j) of the sampling measure behind sample_T_term. The subset
// is listed in draw order, not sorted.
struct TAtom {
  std::vector<std::size_t> subset;
  std::size_t j = 0;
};

// |A| ~ Uniform{0..m-1}, A uniform among subsets of that size, j uniform off A.
// The probability of a given atom is k_{m,A} / m, so m times the summand has
// conditional mean T_m.
TAtom draw_T_atom(std::size_t m, Rng& rng);
double atom_probability(std::size_t m, std::size_t subset_size);
// k_{m,A} for |A| = subset_size.
double subset_weight(std::size_t m, std::size_t subset_size);

// m * Delta_j h(R) * Delta_j h(R^A), or with |Delta_j h(R^A)| for Absolute.
double T_term(const Functional& f, const InstructionStack& stack, const InstructionStack& fresh,
              const TAtom& atom, TermKind kind);
double sample_T_term(const Functional& f, const InstructionStack& stack,
                     const InstructionStack& fresh, Rng& rng, TermKind kind);

inline constexpr std::size_t kBootstrapResamples = 200;

// Var(E[T_m(h) | R]) from `outer` stacks, each carrying two independent inner
// averages of `inner` terms. The product of the two averages is unbiased for
// E[T|R]^2; the square of the mean is replaced by the off-diagonal product
// mean, which makes the whole estimate unbiased. The value can be slightly
// negative; the standard error is a bootstrap over the outer index.
Estimate estimate_var_conditional(const HmmSpec& spec, const Functional& f, std::size_t n,
                                  std::size_t outer, std::size_t inner, Seed seed,
                                  TermKind kind, std::size_t threads = 1);

struct DeltaMoments {
  std::vector<double> orders;
  // per_index[o][i] estimates E|Delta_i h(R)|^orders[o].
  std::vector<std::vector<Estimate>> per_index;
  // sum_i E|Delta_i h|^r.
  std::vector<Estimate> sum;
  // sum_i sqrt(E|Delta_i h|^r), bootstrap standard error.
  std::vector<Estimate> sum_sqrt;
};

// All instruction indices are resampled against the same base stack in each
// sample; indices are summed separately because h is not symmetric.
DeltaMoments estimate_delta_moments(const HmmSpec& spec, const Functional& f, std::size_t n,
                                    const std::vector<double>& orders, std::size_t samples,
                                    Seed seed, std::size_t threads = 1);
std::vector<Estimate> estimate_delta_moments(const HmmSpec& spec, const Functional& f,
                                             std::size_t n, double r, std::size_t samples,
                                             Seed seed, std::size_t threads = 1);

// 1/2 sum_i E[(Delta_i h)^2], the Efron-Stein upper bound on Var h(R).
Estimate efron_stein_sum(const HmmSpec& spec, const Functional& f, std::size_t n,
                         std::size_t samples, Seed seed, std::size_t threads = 1);

struct SteinComponents {
  Estimate sigma2;
  Estimate var_T;
  Estimate var_Tprime;
  Estimate sum_abs3;
  Estimate sum_sqrt6;
};

struct SteinEstimate {
  std::size_t instruction_count = 0;
  Estimate sigma2;
  Estimate var_T;
  Estimate var_Tprime;
  Estimate sum_abs3;
  Estimate sum_sqrt6;
  Estimate wass_bound;
  Estimate kol_bound;
};

// wass = sqrt(var_T)/s2 + sum_abs3/(2 s^3)
// kol  = sqrt(var_T)/s2 + sqrt(var_T')/s2 + sum_sqrt6/(4 s^3) + sqrt(2 pi)/16 sum_abs3/s^3
// Negative variance estimates are clamped to zero first. Standard errors are
// propagated one component at a time by finite differences. Throws
// ZeroVariance if sigma2 <= 0.
SteinEstimate assemble_bounds(const SteinComponents& components, std::size_t m);

struct SteinBudget {
  std::size_t variance_replicates = 4000;
  std::size_t outer = 200;
  std::size_t inner = 200;
  std::size_t moment_samples = 500;
  std::size_t threads = 1;
};

SteinEstimate estimate_stein_bound(const HmmSpec& spec, const Functional& f, std::size_t n,
                                   const SteinBudget& budget, Seed seed);

// sum_i E[(E[f(X'^{i<-X_i}) - f(X') | X_i, H])^2] given the hidden path H,
// where X' is a copy of X drawn independently given H. This lower-bounds
// Var f(X). Nested Monte Carlo with two inner averages per coordinate.
Estimate variance_lower_bound(const HmmSpec& spec, const Functional& f, std::size_t n,
                              std::size_t outer, std::size_t inner, Seed seed,
                              std::size_t threads = 1);

}  // namespace hmmstein

#endif  // HMMSTEIN_PERTURB_HPP_
