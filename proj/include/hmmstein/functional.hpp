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

#ifndef HMMSTEIN_FUNCTIONAL_HPP_
#define HMMSTEIN_FUNCTIONAL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmstein/hmm.hpp"

namespace hmmstein {

// What a functional is allowed to see: the observed symbols and their marks,
// never the hidden states.
struct ObservedView {
  std::span<const Symbol> symbols;
  std::span<const std::uint64_t> marks;

  std::size_t size() const noexcept { return symbols.size(); }
};

inline ObservedView observed_view(const Trajectory& t) { return {t.observed, t.marks}; }

// f: observed sequence -> real. Evaluation must be deterministic; composition
// with reconstruct() gives h = f o gamma on instruction stacks.
class Functional {
 public:
  using Evaluator = std::function<double(const ObservedView&)>;

  Functional(std::string name, Evaluator evaluate,
             std::optional<double> lipschitz_constant = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::optional<double> lipschitz_constant() const noexcept { return lipschitz_; }

  double operator()(const ObservedView& x) const { return evaluate_(x); }
  double operator()(const Trajectory& t) const { return evaluate_(observed_view(t)); }
  // h(R) = f(gamma(R)).
  double of_stack(const InstructionStack& stack) const;
  // Same, reusing `scratch` to avoid allocation in hot loops.
  double of_stack(const InstructionStack& stack, Trajectory& scratch) const;

 private:
  std::string name_;
  Evaluator evaluate_;
  std::optional<double> lipschitz_;
};

Functional constant_functional(double value);

// f(x) = sum_k values[x_k]. Lipschitz with c = max(values) - min(values).
Functional additive_functional(std::vector<double> values);

}  // namespace hmmstein

#endif  // HMMSTEIN_FUNCTIONAL_HPP_
