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

#include "hmmstein/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "hmmstein/error.hpp"

namespace hmmstein {

using nlohmann::json;

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) fail(ErrorCode::BadDimensions, "ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + r * cols);
  }
  return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
  return out;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) fail(ErrorCode::BadDimensions, "matrix product shape mismatch");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

double Matrix::min_entry() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

namespace {

void check_distribution(std::span<const double> row, const char* what) {
  // Neumaier summation; long rows of 1/L would drift past the tolerance.
  double sum = 0.0, carry = 0.0;
  for (double v : row) {
    if (!std::isfinite(v)) fail(ErrorCode::NonStochasticRow, std::string(what) + " has a non-finite entry");
    if (v < 0.0) fail(ErrorCode::NegativeEntry, std::string(what) + " has a negative entry");
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  sum += carry;
  if (std::abs(sum - 1.0) > kStochasticTolerance)
    fail(ErrorCode::NonStochasticRow, std::string(what) + " sums to " + std::to_string(sum));
}

}  // namespace

void validate_spec(const HmmSpec& spec) {
  if (spec.num_states == 0 || spec.num_symbols == 0)
    fail(ErrorCode::BadDimensions, "model needs at least one state and one symbol");
  if (spec.initial.size() != spec.num_states)
    fail(ErrorCode::BadDimensions, "mu length differs from the number of states");
  if (spec.transition.rows() != spec.num_states || spec.transition.cols() != spec.num_states)
    fail(ErrorCode::BadDimensions, "P must be |S| x |S|");
  if (spec.emission.rows() != spec.num_states || spec.emission.cols() != spec.num_symbols)
    fail(ErrorCode::BadDimensions, "Q must be |S| x |A|");
  if (spec.num_states > (1ULL << 31) || spec.num_symbols > (1ULL << 31))
    fail(ErrorCode::BadDimensions, "too many states or symbols");
  // Sign errors are reported before sum errors, whichever matrix they are in.
  auto negative = [](std::span<const double> v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
  };
  bool any_negative = negative(spec.initial);
  for (std::size_t s = 0; s < spec.num_states; ++s)
    any_negative = any_negative || negative(spec.transition.row(s)) || negative(spec.emission.row(s));
  if (any_negative) fail(ErrorCode::NegativeEntry, "model has a negative probability");

  check_distribution(spec.initial, "mu");
  for (std::size_t s = 0; s < spec.num_states; ++s) {
    check_distribution(spec.transition.row(s), "row of P");
    check_distribution(spec.emission.row(s), "row of Q");
  }
}

HmmSpec iid_spec(std::span<const double> symbol_probabilities) {
  HmmSpec spec;
  spec.num_states = 1;
  spec.num_symbols = symbol_probabilities.size();
  spec.initial = {1.0};
  spec.transition = Matrix(1, 1, 1.0);
  spec.emission = Matrix(1, spec.num_symbols);
  for (std::size_t x = 0; x < spec.num_symbols; ++x) spec.emission(0, x) = symbol_probabilities[x];
  validate_spec(spec);
  return spec;
}

HmmSpec parse_spec_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigParse, std::string("model is not valid JSON: ") + e.what());
  }
  HmmSpec spec;
  try {
    spec.num_states = doc.at("states").get<std::size_t>();
    spec.num_symbols = doc.at("symbols").get<std::size_t>();
    spec.initial = doc.at("mu").get<std::vector<double>>();
    spec.transition = Matrix::from_rows(doc.at("P").get<std::vector<std::vector<double>>>());
    spec.emission = Matrix::from_rows(doc.at("Q").get<std::vector<std::vector<double>>>());
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigParse, std::string("model field missing or mistyped: ") + e.what());
  }
  validate_spec(spec);
  return spec;
}

std::string spec_to_json(const HmmSpec& spec) {
  json doc;
  doc["states"] = spec.num_states;
  doc["symbols"] = spec.num_symbols;
  doc["mu"] = spec.initial;
  doc["P"] = spec.transition.to_rows();
  doc["Q"] = spec.emission.to_rows();
  return doc.dump();
}

MixingConstants mixing_constants(const HmmSpec& spec, std::size_t k_max) {
  validate_spec(spec);
  if (k_max == 0) fail(ErrorCode::InvalidArgument, "k_max must be positive");
  Matrix power = spec.transition;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double least = power.min_entry();
    if (least > 0.0) return {k, least};
    power = power * spec.transition;
  }
  fail(ErrorCode::NotMixing, "no power of P up to " + std::to_string(k_max) +
                                 " is strictly positive (periodic or reducible chain)");
}

std::vector<double> stationary_distribution(const Matrix& transition) {
  const std::size_t n = transition.rows();
  if (n == 0 || transition.cols() != n) fail(ErrorCode::BadDimensions, "P must be square");
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int iter = 0; iter < 10'000'000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * transition(i, j);
    double change = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] = 0.5 * (next[j] + pi[j]);
      change += std::abs(next[j] - pi[j]);
      total += next[j];
    }
    for (double& v : next) v /= total;
    pi.swap(next);
    if (change < 1e-14) break;
  }
  return pi;
}

HmmSpec with_stationary_start(HmmSpec spec) {
  spec.initial = stationary_distribution(spec.transition);
  return spec;
}

void validate_stack(const InstructionStack& stack, const HmmSpec& spec) {
  if (stack.n == 0) fail(ErrorCode::InvalidArgument, "stack for an empty trajectory");
  if (stack.num_states != spec.num_states || stack.size() != stack_size(spec.num_states, stack.n))
    fail(ErrorCode::LengthMismatch, "stack length does not match |S|(n-1)+1");
  for (const Instruction& e : stack.entries)
    if (e.state >= spec.num_states || e.symbol >= spec.num_symbols)
      fail(ErrorCode::IndexOutOfRange, "stack entry out of range");
}

InstructionSampler::InstructionSampler(HmmSpec spec) : spec_(std::move(spec)) {
  validate_spec(spec_);
  initial_ = AliasTable(spec_.initial);
  transition_.reserve(spec_.num_states);
  emission_.reserve(spec_.num_states);
  for (std::size_t s = 0; s < spec_.num_states; ++s) {
    transition_.emplace_back(spec_.transition.row(s));
    emission_.emplace_back(spec_.emission.row(s));
  }
}

Instruction InstructionSampler::sample_emission(State state, Rng& rng) const {
  Instruction out;
  out.state = state;
  out.symbol = static_cast<Symbol>(emission_[state].sample(rng));
  out.mark = rng.next();
  return out;
}

Instruction InstructionSampler::sample_entry(std::size_t index, Rng& rng) const {
  State state;
  if (index == 0) {
    state = static_cast<State>(initial_.sample(rng));
  } else {
    const auto from = static_cast<State>((index - 1) % spec_.num_states);
    state = static_cast<State>(transition_[from].sample(rng));
  }
  return sample_emission(state, rng);
}

InstructionStack InstructionSampler::sample(std::size_t n, Rng& rng) const {
  if (n == 0) fail(ErrorCode::InvalidArgument, "trajectory length must be at least 1");
  InstructionStack stack;
  stack.n = n;
  stack.num_states = spec_.num_states;
  const std::size_t m = stack_size(spec_.num_states, n);
  stack.entries.resize(m);
  for (std::size_t i = 0; i < m; ++i) stack.entries[i] = sample_entry(i, rng);
  return stack;
}

void InstructionSampler::sample_path(std::size_t n, Rng& rng, Trajectory& out) const {
  if (n == 0) fail(ErrorCode::InvalidArgument, "trajectory length must be at least 1");
  out.hidden.resize(n);
  out.observed.resize(n);
  out.marks.resize(n);
  out.source.resize(n);
  std::size_t index = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) index = entry_index(k, out.hidden[k - 1], spec_.num_states);
    const Instruction e = sample_entry(index, rng);
    out.hidden[k] = e.state;
    out.observed[k] = e.symbol;
    out.marks[k] = e.mark;
    out.source[k] = index;
  }
}

InstructionStack sample_instructions(const HmmSpec& spec, std::size_t n, Rng& rng) {
  return InstructionSampler(spec).sample(n, rng);
}

void reconstruct_into(const InstructionStack& stack, Trajectory& out) {
  const std::size_t n = stack.n;
  if (n == 0 || stack.num_states == 0 || stack.size() != stack_size(stack.num_states, n))
    fail(ErrorCode::LengthMismatch, "malformed instruction stack");
  out.hidden.resize(n);
  out.observed.resize(n);
  out.marks.resize(n);
  out.source.resize(n);
  std::size_t index = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) index = entry_index(k, out.hidden[k - 1], stack.num_states);
    const Instruction& e = stack.entries[index];
    out.hidden[k] = e.state;
    out.observed[k] = e.symbol;
    out.marks[k] = e.mark;
    out.source[k] = index;
  }
}

Trajectory reconstruct(const InstructionStack& stack) {
  Trajectory t;
  reconstruct_into(stack, t);
  return t;
}

PerturbationSet::PerturbationSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  for (std::size_t k = 1; k < indices_.size(); ++k)
    if (indices_[k] <= indices_[k - 1])
      fail(ErrorCode::InvalidArgument, "perturbation indices must be strictly increasing");
}

PerturbationSet PerturbationSet::from_unsorted(std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return PerturbationSet(std::move(indices));
}

PerturbationSet PerturbationSet::all(std::size_t size) {
  std::vector<std::size_t> v(size);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return PerturbationSet(std::move(v));
}

bool PerturbationSet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

PerturbationSet PerturbationSet::with(std::size_t i) const {
  std::vector<std::size_t> v = indices_;
  v.insert(std::upper_bound(v.begin(), v.end(), i), i);
  return from_unsorted(std::move(v));
}

void perturb_in_place(InstructionStack& stack, std::span<const std::size_t> indices,
                      const InstructionStack& fresh) {
  if (fresh.size() != stack.size() || fresh.n != stack.n || fresh.num_states != stack.num_states)
    fail(ErrorCode::LengthMismatch, "fresh stack does not match the original");
  for (std::size_t i : indices) {
    if (i >= stack.size()) fail(ErrorCode::IndexOutOfRange, "perturbation index out of range");
    stack.entries[i] = fresh.entries[i];
  }
}

InstructionStack perturb(const InstructionStack& stack, const PerturbationSet& A,
                         const InstructionStack& fresh) {
  InstructionStack out = stack;
  perturb_in_place(out, A.indices(), fresh);
  return out;
}

CouplingLength coupling_length(const InstructionStack& stack, std::size_t i,
                               const InstructionStack& fresh) {
  if (i >= stack.size()) fail(ErrorCode::IndexOutOfRange, "coupling index out of range");
  const Trajectory original = reconstruct(stack);
  const auto it = std::find(original.source.begin(), original.source.end(), i);
  if (it == original.source.end()) return CouplingLength::finite(0);
  const auto j = static_cast<std::size_t>(it - original.source.begin());

  const std::size_t one[] = {i};
  InstructionStack changed = stack;
  perturb_in_place(changed, one, fresh);
  const Trajectory other = reconstruct(changed);
  for (std::size_t k = j; k < original.size(); ++k)
    if (original.hidden[k] == other.hidden[k]) return CouplingLength::finite(k - j);
  return CouplingLength::infinite();
}

}  // namespace hmmstein
