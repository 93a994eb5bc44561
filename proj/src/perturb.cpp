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

#include "hmmstein/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "hmmstein/error.hpp"
#include "hmmstein/parallel.hpp"

namespace hmmstein {

namespace {

void check_pair(const InstructionStack& stack, const InstructionStack& fresh) {
  if (stack.size() != fresh.size() || stack.n != fresh.n || stack.num_states != fresh.num_states)
    fail(ErrorCode::LengthMismatch, "stack and fresh copy differ in shape");
  if (stack.size() == 0) fail(ErrorCode::LengthMismatch, "empty instruction stack");
}

// A mutable copy of R that is edited and restored in place, so one term costs
// O(|A|) edits plus the evaluations.
class Workspace {
 public:
  Workspace(const Functional& f, const InstructionStack& stack)
      : f_(f), base_(stack), work_(stack) {}

  double evaluate() { return f_.of_stack(work_, scratch_); }

  void take(std::span<const std::size_t> indices, const InstructionStack& fresh) {
    for (std::size_t i : indices) work_.entries[i] = fresh.entries[i];
  }
  void take(std::size_t i, const InstructionStack& fresh) { work_.entries[i] = fresh.entries[i]; }
  void restore(std::span<const std::size_t> indices) {
    for (std::size_t i : indices) work_.entries[i] = base_.entries[i];
  }
  void restore(std::size_t i) { work_.entries[i] = base_.entries[i]; }

  // m * Delta_j h(R) * Delta_j h(R^A), given hR = h(R).
  double term(double hR, const TAtom& atom, const InstructionStack& fresh, TermKind kind) {
    const double m = static_cast<double>(base_.size());
    take(atom.j, fresh);
    const double hRj = evaluate();
    restore(atom.j);
    take(atom.subset, fresh);
    const double hRA = evaluate();
    take(atom.j, fresh);
    const double hRAj = evaluate();
    restore(atom.j);
    restore(atom.subset);
    const double outer = hR - hRj;
    const double inner = hRA - hRAj;
    return m * outer * (kind == TermKind::Absolute ? std::abs(inner) : inner);
  }

 private:
  const Functional& f_;
  const InstructionStack& base_;
  InstructionStack work_;
  Trajectory scratch_;
};

// Fills only the entries of `fresh` that the atom reads.
void draw_needed(const InstructionSampler& sampler, const TAtom& atom, InstructionStack& fresh,
                 Rng& rng) {
  for (std::size_t i : atom.subset) fresh.entries[i] = sampler.sample_entry(i, rng);
  fresh.entries[atom.j] = sampler.sample_entry(atom.j, rng);
}

InstructionStack blank_like(const InstructionStack& stack) {
  InstructionStack out;
  out.n = stack.n;
  out.num_states = stack.num_states;
  out.entries.resize(stack.size());
  return out;
}

}  // namespace

double delta(const Functional& f, const InstructionStack& stack, std::size_t i,
             const InstructionStack& fresh) {
  check_pair(stack, fresh);
  if (i >= stack.size()) fail(ErrorCode::IndexOutOfRange, "delta index out of range");
  InstructionStack changed = stack;
  changed.entries[i] = fresh.entries[i];
  return f.of_stack(stack) - f.of_stack(changed);
}

double delta_A(const Functional& f, const InstructionStack& stack, const PerturbationSet& A,
               std::size_t i, const InstructionStack& fresh) {
  check_pair(stack, fresh);
  if (i >= stack.size()) fail(ErrorCode::IndexOutOfRange, "delta index out of range");
  if (A.contains(i)) fail(ErrorCode::IndexInA, "index already belongs to the perturbation set");
  InstructionStack changed = perturb(stack, A, fresh);
  const double before = f.of_stack(changed);
  changed.entries[i] = fresh.entries[i];
  return before - f.of_stack(changed);
}

TAtom draw_T_atom(std::size_t m, Rng& rng) {
  if (m == 0) fail(ErrorCode::InvalidArgument, "empty instruction stack");
  const std::size_t a = rng.below(m);
  // Partial Fisher-Yates: the first a slots form A, slot a..m-1 holds j.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t k = 0; k <= a; ++k) {
    const std::size_t pick = k + rng.below(m - k);
    std::swap(order[k], order[pick]);
  }
  TAtom atom;
  atom.j = order[a];
  order.resize(a);
  atom.subset = std::move(order);
  return atom;
}

double subset_weight(std::size_t m, std::size_t subset_size) {
  if (subset_size >= m) fail(ErrorCode::InvalidArgument, "subset must be proper");
  // 1 / (C(m, a) * (m - a)), via lgamma to stay finite for large m.
  const double log_binom = std::lgamma(static_cast<double>(m) + 1.0) -
                           std::lgamma(static_cast<double>(subset_size) + 1.0) -
                           std::lgamma(static_cast<double>(m - subset_size) + 1.0);
  return std::exp(-log_binom) / static_cast<double>(m - subset_size);
}

double atom_probability(std::size_t m, std::size_t subset_size) {
  return subset_weight(m, subset_size) / static_cast<double>(m);
}

double T_term(const Functional& f, const InstructionStack& stack, const InstructionStack& fresh,
              const TAtom& atom, TermKind kind) {
  check_pair(stack, fresh);
  if (atom.j >= stack.size()) fail(ErrorCode::IndexOutOfRange, "atom index out of range");
  for (std::size_t i : atom.subset) {
    if (i >= stack.size()) fail(ErrorCode::IndexOutOfRange, "atom subset out of range");
    if (i == atom.j) fail(ErrorCode::IndexInA, "atom index lies in its own subset");
  }
  Workspace ws(f, stack);
  const double hR = ws.evaluate();
  return ws.term(hR, atom, fresh, kind);
}

double sample_T_term(const Functional& f, const InstructionStack& stack,
                     const InstructionStack& fresh, Rng& rng, TermKind kind) {
  check_pair(stack, fresh);
  return T_term(f, stack, fresh, draw_T_atom(stack.size(), rng), kind);
}

namespace {

// Unbiased estimate of Var(E[T|R]) from paired inner means.
double paired_variance(std::span<const double> t1, std::span<const double> t2,
                       std::span<const std::size_t> pick) {
  const auto count = static_cast<double>(pick.size());
  double s1 = 0.0, s2 = 0.0, diag = 0.0;
  for (std::size_t k : pick) {
    s1 += t1[k];
    s2 += t2[k];
    diag += t1[k] * t2[k];
  }
  const double square_of_mean = (s1 * s2 - diag) / (count * (count - 1.0));
  return diag / count - square_of_mean;
}

double bootstrap_se(std::size_t count, Seed seed,
                    const std::function<double(std::span<const std::size_t>)>& statistic) {
  Rng rng = seed.rng();
  std::vector<std::size_t> pick(count);
  std::vector<double> values(kBootstrapResamples);
  for (double& v : values) {
    for (std::size_t& p : pick) p = rng.below(count);
    v = statistic(pick);
  }
  return std::sqrt(sample_variance(values));
}

}  // namespace

Estimate estimate_var_conditional(const HmmSpec& spec, const Functional& f, std::size_t n,
                                  std::size_t outer, std::size_t inner, Seed seed,
                                  TermKind kind, std::size_t threads) {
  if (outer < 2 || inner < 2)
    fail(ErrorCode::InsufficientSamples, "conditional variance needs outer >= 2 and inner >= 2");
  const InstructionSampler sampler(spec);
  std::vector<double> t1(outer), t2(outer);
  parallel_for(outer, threads, [&](std::size_t k) {
    Rng rng = seed.derive({1, k}).rng();
    const InstructionStack stack = sampler.sample(n, rng);
    InstructionStack fresh = blank_like(stack);
    Workspace ws(f, stack);
    const double hR = ws.evaluate();
    for (double* slot : {&t1[k], &t2[k]}) {
      double acc = 0.0;
      for (std::size_t l = 0; l < inner; ++l) {
        const TAtom atom = draw_T_atom(stack.size(), rng);
        draw_needed(sampler, atom, fresh, rng);
        acc += ws.term(hR, atom, fresh, kind);
      }
      *slot = acc / static_cast<double>(inner);
    }
  });
  std::vector<std::size_t> all(outer);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Estimate e;
  e.value = paired_variance(t1, t2, all);
  e.standard_error = bootstrap_se(outer, seed.derive(2), [&](std::span<const std::size_t> pick) {
    return paired_variance(t1, t2, pick);
  });
  return e;
}

DeltaMoments estimate_delta_moments(const HmmSpec& spec, const Functional& f, std::size_t n,
                                    const std::vector<double>& orders, std::size_t samples,
                                    Seed seed, std::size_t threads) {
  if (samples < 2) fail(ErrorCode::InsufficientSamples, "delta moments need at least 2 samples");
  for (double r : orders)
    if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "moment order must be positive");
  const InstructionSampler sampler(spec);
  const std::size_t m = stack_size(spec.num_states, n);
  // |Delta_i| for sample k at abs_delta[k * m + i].
  std::vector<double> abs_delta(samples * m);
  parallel_for(samples, threads, [&](std::size_t k) {
    Rng rng = seed.derive({3, k}).rng();
    const InstructionStack stack = sampler.sample(n, rng);
    Workspace ws(f, stack);
    InstructionStack fresh = blank_like(stack);
    const double hR = ws.evaluate();
    for (std::size_t i = 0; i < m; ++i) {
      fresh.entries[i] = sampler.sample_entry(i, rng);
      ws.take(i, fresh);
      abs_delta[k * m + i] = std::abs(hR - ws.evaluate());
      ws.restore(i);
    }
  });

  DeltaMoments out;
  out.orders = orders;
  const auto ns = static_cast<double>(samples);
  std::vector<double> powered(samples * m);
  for (double r : orders) {
    for (std::size_t q = 0; q < powered.size(); ++q) powered[q] = std::pow(abs_delta[q], r);
    std::vector<Estimate> per(m);
    std::vector<double> column(samples), sums(samples, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < samples; ++k) {
        column[k] = powered[k * m + i];
        sums[k] += column[k];
      }
      per[i] = mean_estimate(column);
    }
    auto sqrt_sum = [&](std::span<const std::size_t> pick) {
      double total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t k : pick) acc += powered[k * m + i];
        total += std::sqrt(acc / ns);
      }
      return total;
    };
    std::vector<std::size_t> all(samples);
    std::iota(all.begin(), all.end(), std::size_t{0});
    Estimate root{sqrt_sum(all), 0.0};
    root.standard_error = bootstrap_se(samples, seed.derive({4, out.sum.size()}), sqrt_sum);
    out.per_index.push_back(std::move(per));
    out.sum.push_back(mean_estimate(sums));
    out.sum_sqrt.push_back(root);
  }
  return out;
}

std::vector<Estimate> estimate_delta_moments(const HmmSpec& spec, const Functional& f,
                                             std::size_t n, double r, std::size_t samples,
                                             Seed seed, std::size_t threads) {
  return estimate_delta_moments(spec, f, n, std::vector<double>{r}, samples, seed, threads)
      .per_index.front();
}

Estimate efron_stein_sum(const HmmSpec& spec, const Functional& f, std::size_t n,
                         std::size_t samples, Seed seed, std::size_t threads) {
  const DeltaMoments dm = estimate_delta_moments(spec, f, n, std::vector<double>{2.0}, samples, seed, threads);
  return {0.5 * dm.sum.front().value, 0.5 * dm.sum.front().standard_error};
}

namespace {

struct BoundValues {
  double wass;
  double kol;
};

BoundValues bound_formulas(double sigma2, double var_T, double var_Tprime, double sum_abs3,
                           double sum_sqrt6) {
  const double sigma3 = std::pow(sigma2, 1.5);
  const double root_T = std::sqrt(std::max(var_T, 0.0)) / sigma2;
  const double root_Tp = std::sqrt(std::max(var_Tprime, 0.0)) / sigma2;
  BoundValues b;
  b.wass = root_T + sum_abs3 / (2.0 * sigma3);
  b.kol = root_T + root_Tp + sum_sqrt6 / (4.0 * sigma3) +
          std::sqrt(2.0 * std::numbers::pi) / 16.0 * sum_abs3 / sigma3;
  return b;
}

}  // namespace

SteinEstimate assemble_bounds(const SteinComponents& c, std::size_t m) {
  if (!(c.sigma2.value > 0.0)) fail(ErrorCode::ZeroVariance, "sigma^2 must be positive");
  auto clamp = [](Estimate e) {
    e.value = std::max(e.value, 0.0);
    e.standard_error = std::max(e.standard_error, 0.0);
    return e;
  };
  SteinEstimate s;
  s.instruction_count = m;
  s.sigma2 = c.sigma2;
  s.var_T = clamp(c.var_T);
  s.var_Tprime = clamp(c.var_Tprime);
  s.sum_abs3 = clamp(c.sum_abs3);
  s.sum_sqrt6 = clamp(c.sum_sqrt6);

  double v[5] = {s.sigma2.value, s.var_T.value, s.var_Tprime.value, s.sum_abs3.value,
                 s.sum_sqrt6.value};
  const double se[5] = {s.sigma2.standard_error, s.var_T.standard_error,
                        s.var_Tprime.standard_error, s.sum_abs3.standard_error,
                        s.sum_sqrt6.standard_error};
  auto eval = [&](const double* x) { return bound_formulas(x[0], x[1], x[2], x[3], x[4]); };
  const BoundValues centre = eval(v);
  double wass_var = 0.0, kol_var = 0.0;
  for (int k = 0; k < 5; ++k) {
    if (se[k] == 0.0) continue;
    double hi[5], lo[5];
    std::copy(v, v + 5, hi);
    std::copy(v, v + 5, lo);
    hi[k] += se[k];
    double dw, dk;
    if (k == 0 && v[0] - se[0] > 0.0) {
      lo[k] -= se[k];
      const BoundValues up = eval(hi), down = eval(lo);
      dw = 0.5 * (up.wass - down.wass);
      dk = 0.5 * (up.kol - down.kol);
    } else {
      const BoundValues up = eval(hi);
      dw = up.wass - centre.wass;
      dk = up.kol - centre.kol;
    }
    wass_var += dw * dw;
    kol_var += dk * dk;
  }
  s.wass_bound = {centre.wass, std::sqrt(wass_var)};
  s.kol_bound = {centre.kol, std::sqrt(kol_var)};
  return s;
}

SteinEstimate estimate_stein_bound(const HmmSpec& spec, const Functional& f, std::size_t n,
                                   const SteinBudget& budget, Seed seed) {
  if (budget.variance_replicates < 4)
    fail(ErrorCode::InsufficientSamples, "need at least 4 replicates for sigma^2");
  const InstructionSampler sampler(spec);
  std::vector<double> w(budget.variance_replicates);
  parallel_for(w.size(), budget.threads, [&](std::size_t k) {
    Rng rng = seed.derive({10, k}).rng();
    w[k] = f.of_stack(sampler.sample(n, rng));
  });
  SteinComponents c;
  c.sigma2 = variance_estimate(w);
  if (!(c.sigma2.value > 0.0)) fail(ErrorCode::ZeroVariance, "functional has zero sample variance");
  c.var_T = estimate_var_conditional(spec, f, n, budget.outer, budget.inner, seed.derive(11),
                                     TermKind::Plain, budget.threads);
  c.var_Tprime = estimate_var_conditional(spec, f, n, budget.outer, budget.inner, seed.derive(12),
                                          TermKind::Absolute, budget.threads);
  const DeltaMoments dm = estimate_delta_moments(spec, f, n, std::vector<double>{3.0, 6.0}, budget.moment_samples,
                                                 seed.derive(13), budget.threads);
  c.sum_abs3 = dm.sum[0];
  c.sum_sqrt6 = dm.sum_sqrt[1];
  return assemble_bounds(c, stack_size(spec.num_states, n));
}

Estimate variance_lower_bound(const HmmSpec& spec, const Functional& f, std::size_t n,
                              std::size_t outer, std::size_t inner, Seed seed,
                              std::size_t threads) {
  if (outer < 2 || inner < 2)
    fail(ErrorCode::InsufficientSamples, "variance lower bound needs outer >= 2 and inner >= 2");
  const InstructionSampler sampler(spec);
  std::vector<double> per_outer(outer);
  parallel_for(outer, threads, [&](std::size_t k) {
    Rng rng = seed.derive({20, k}).rng();
    const Trajectory x = reconstruct(sampler.sample(n, rng));
    std::vector<Symbol> symbols(n);
    std::vector<std::uint64_t> marks(n);
    const ObservedView view{symbols, marks};
    std::vector<double> first(n), second(n);
    for (std::vector<double>* batch : {&first, &second}) {
      std::fill(batch->begin(), batch->end(), 0.0);
      for (std::size_t l = 0; l < inner; ++l) {
        for (std::size_t t = 0; t < n; ++t) {
          const Instruction e = sampler.sample_emission(x.hidden[t], rng);
          symbols[t] = e.symbol;
          marks[t] = e.mark;
        }
        const double base = f(view);
        for (std::size_t i = 0; i < n; ++i) {
          const Symbol keep_symbol = symbols[i];
          const std::uint64_t keep_mark = marks[i];
          symbols[i] = x.observed[i];
          marks[i] = x.marks[i];
          (*batch)[i] += f(view) - base;
          symbols[i] = keep_symbol;
          marks[i] = keep_mark;
        }
      }
    }
    const double scale = 1.0 / (static_cast<double>(inner) * static_cast<double>(inner));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += first[i] * second[i] * scale;
    per_outer[k] = total;
  });
  return mean_estimate(per_outer);
}

}  // namespace hmmstein
