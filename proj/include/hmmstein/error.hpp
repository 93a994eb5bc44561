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

#ifndef HMMSTEIN_ERROR_HPP_
#define HMMSTEIN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmmstein {

enum class ErrorCode {
  NonStochasticRow,
  NegativeEntry,
  BadDimensions,
  NotMixing,
  LengthMismatch,
  IndexOutOfRange,
  IndexInA,
  InsufficientSamples,
  ZeroVariance,
  EmptySample,
  NonPositiveSd,
  TooFewPoints,
  NonPositiveValue,
  StateMismatch,
  EmptyNuclei,
  SymbolOutOfRange,
  ConfigParse,
  UnknownFunctional,
  MissingRun,
  InvalidArgument,
  Io,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// the C API can translate it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace hmmstein

#endif  // HMMSTEIN_ERROR_HPP_
