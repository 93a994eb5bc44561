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

#include "hmmstein/functional.hpp"

#include <algorithm>
#include <memory>

#include "hmmstein/error.hpp"

namespace hmmstein {

Functional::Functional(std::string name, Evaluator evaluate,
                       std::optional<double> lipschitz_constant)
    : name_(std::move(name)), evaluate_(std::move(evaluate)), lipschitz_(lipschitz_constant) {
  if (!evaluate_) fail(ErrorCode::InvalidArgument, "functional without an evaluator");
  if (lipschitz_ && !(*lipschitz_ > 0.0))
    fail(ErrorCode::InvalidArgument, "Lipschitz constant must be positive");
}

double Functional::of_stack(const InstructionStack& stack) const {
  Trajectory scratch;
  return of_stack(stack, scratch);
}

double Functional::of_stack(const InstructionStack& stack, Trajectory& scratch) const {
  reconstruct_into(stack, scratch);
  return evaluate_(observed_view(scratch));
}

Functional constant_functional(double value) {
  return Functional("builtin.constant", [value](const ObservedView&) { return value; });
}

Functional additive_functional(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "additive functional needs symbol values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double spread = *hi - *lo;
  auto table = std::make_shared<const std::vector<double>>(std::move(values));
  return Functional(
      "builtin.additive",
      [table](const ObservedView& x) {
        double sum = 0.0;
        for (Symbol s : x.symbols) {
          if (s >= table->size()) fail(ErrorCode::SymbolOutOfRange, "symbol has no value");
          sum += (*table)[s];
        }
        return sum;
      },
      spread > 0.0 ? std::optional<double>(spread) : std::nullopt);
}

}  // namespace hmmstein
