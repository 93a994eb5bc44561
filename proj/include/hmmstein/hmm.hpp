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

#ifndef HMMSTEIN_HMM_HPP_
#define HMMSTEIN_HMM_HPP_

// Hidden Markov models represented through stacks of independent
// instructions. Entry 0 of a stack fixes the first (state, symbol) pair; the
// entry for step i and hidden state s says where the chain goes next when it
// sits in s at step i. Reconstruction reads exactly one entry per step.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmstein/random.hpp"

namespace hmmstein {

using State = std::uint32_t;
using Symbol = std::uint32_t;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<std::vector<double>> to_rows() const;
  Matrix operator*(const Matrix& rhs) const;
  double min_entry() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct HmmSpec {
  std::size_t num_states = 0;
  std::size_t num_symbols = 0;
  std::vector<double> initial;  // mu
  Matrix transition;            // P, num_states x num_states
  Matrix emission;              // Q, num_states x num_symbols

  bool operator==(const HmmSpec&) const = default;
};

inline constexpr double kStochasticTolerance = 1e-12;

// Throws Error(BadDimensions | NegativeEntry | NonStochasticRow).
void validate_spec(const HmmSpec& spec);

// Single-state model emitting symbols with the given probabilities.
HmmSpec iid_spec(std::span<const double> symbol_probabilities);

HmmSpec parse_spec_json(const std::string& text);
std::string spec_to_json(const HmmSpec& spec);

struct MixingConstants {
  std::size_t K = 1;
  double epsilon = 0.0;
};

inline std::size_t default_k_max(const HmmSpec& spec) {
  return 10 * spec.num_states * spec.num_states;
}

// Smallest K <= k_max with every entry of P^K positive; epsilon is the least
// entry of that power. Throws Error(NotMixing) otherwise.
MixingConstants mixing_constants(const HmmSpec& spec, std::size_t k_max);
inline MixingConstants mixing_constants(const HmmSpec& spec) {
  return mixing_constants(spec, default_k_max(spec));
}

// Stationary law of P to 1e-12 in L1, by power iteration on (I + P) / 2.
std::vector<double> stationary_distribution(const Matrix& transition);
HmmSpec with_stationary_start(HmmSpec spec);

struct Instruction {
  State state = 0;
  Symbol symbol = 0;
  // Extra independent randomness travelling with the instruction, used by
  // functionals whose observations carry a continuous part (germ positions,
  // Voronoi nuclei). Resampled together with (state, symbol).
  std::uint64_t mark = 0;

  bool operator==(const Instruction&) const = default;
};

// Number of instructions for a trajectory of length n: |S|(n-1)+1.
inline std::size_t stack_size(std::size_t num_states, std::size_t n) {
  return num_states * (n - 1) + 1;
}

// Entry read when leaving state `from` at step `step` (1-based, step >= 1).
inline std::size_t entry_index(std::size_t step, State from, std::size_t num_states) {
  return (step - 1) * num_states + from + 1;
}

struct InstructionStack {
  std::size_t n = 0;
  std::size_t num_states = 0;
  std::vector<Instruction> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool operator==(const InstructionStack&) const = default;
};

// Checks the length and range invariants against a model.
void validate_stack(const InstructionStack& stack, const HmmSpec& spec);

// Precomputed alias tables for drawing instructions from a fixed model.
struct Trajectory;

class InstructionSampler {
 public:
  explicit InstructionSampler(HmmSpec spec);

  const HmmSpec& spec() const noexcept { return spec_; }
  InstructionStack sample(std::size_t n, Rng& rng) const;
  // A single fresh draw of entry `index` of a length-n stack.
  Instruction sample_entry(std::size_t index, Rng& rng) const;
  // Symbol (and mark) for a given hidden state, i.e. a draw from Q_{state,.}.
  Instruction sample_emission(State state, Rng& rng) const;
  // Draws only the entries that reconstruct() reads, in reading order. The
  // path has the law of reconstruct(sample(n, rng)) but not its stream.
  void sample_path(std::size_t n, Rng& rng, Trajectory& out) const;

 private:
  HmmSpec spec_;
  AliasTable initial_;
  std::vector<AliasTable> transition_;
  std::vector<AliasTable> emission_;
};

InstructionStack sample_instructions(const HmmSpec& spec, std::size_t n, Rng& rng);

struct Trajectory {
  std::vector<State> hidden;
  std::vector<Symbol> observed;
  std::vector<std::uint64_t> marks;
  // source[k] is the stack entry that produced step k (0-based).
  std::vector<std::size_t> source;

  std::size_t size() const noexcept { return hidden.size(); }
};

Trajectory reconstruct(const InstructionStack& stack);
void reconstruct_into(const InstructionStack& stack, Trajectory& out);

class PerturbationSet {
 public:
  PerturbationSet() = default;
  // Indices must be strictly increasing; throws InvalidArgument otherwise.
  explicit PerturbationSet(std::vector<std::size_t> indices);
  static PerturbationSet from_unsorted(std::vector<std::size_t> indices);
  static PerturbationSet all(std::size_t size);

  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::size_t i) const;
  PerturbationSet with(std::size_t i) const;

 private:
  std::vector<std::size_t> indices_;
};

// R^A: entries in A come from `fresh`, the rest from `stack`.
InstructionStack perturb(const InstructionStack& stack, const PerturbationSet& A,
                         const InstructionStack& fresh);
// Same, without ordering requirements on the index list.
void perturb_in_place(InstructionStack& stack, std::span<const std::size_t> indices,
                      const InstructionStack& fresh);

class CouplingLength {
 public:
  static CouplingLength finite(std::size_t steps) { return CouplingLength(steps); }
  static CouplingLength infinite() { return CouplingLength(std::nullopt); }

  bool is_infinite() const noexcept { return !steps_.has_value(); }
  // Precondition: !is_infinite().
  std::size_t steps() const { return *steps_; }
  bool at_least(std::size_t threshold) const {
    return is_infinite() || *steps_ >= threshold;
  }

 private:
  explicit CouplingLength(std::optional<std::size_t> steps) : steps_(steps) {}
  std::optional<std::size_t> steps_;
};

// Steps until the hidden chains built from `stack` and from `stack` with entry
// i replaced by fresh[i] meet again, counted from the step that reads entry i.
// Entries never read give 0; chains still apart at step n give infinite().
CouplingLength coupling_length(const InstructionStack& stack, std::size_t i,
                               const InstructionStack& fresh);

}  // namespace hmmstein

#endif  // HMMSTEIN_HMM_HPP_
