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

#include "hmmstein/random.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "hmmstein/error.hpp"

namespace hmmstein {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::NotMixing: return "NotMixing";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::IndexInA: return "IndexInA";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NonPositiveSd: return "NonPositiveSd";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::StateMismatch: return "StateMismatch";
    case ErrorCode::EmptyNuclei: return "EmptyNuclei";
    case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownFunctional: return "UnknownFunctional";
    case ErrorCode::MissingRun: return "MissingRun";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t Rng::below(std::size_t bound) {
  // Multiply-shift keeps the bias below 2^-64 * bound, negligible here.
  __extension__ using u128 = unsigned __int128;
  const u128 product =
      static_cast<u128>(engine_()) * bound;
  return static_cast<std::size_t>(product >> 64);
}

Seed Seed::derive(std::uint64_t id) const noexcept {
  return Seed(splitmix64(splitmix64(value_) ^ splitmix64(id + 0x243f6a8885a308d3ULL)));
}

Seed Seed::derive(std::initializer_list<std::uint64_t> path) const noexcept {
  Seed s = *this;
  for (std::uint64_t id : path) s = s.derive(id);
  return s;
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) fail(ErrorCode::BadDimensions, "alias table needs at least one weight");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) fail(ErrorCode::InvalidArgument, "alias table weights sum to zero");

  threshold_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0) fail(ErrorCode::NegativeEntry, "alias table weight is negative");
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    threshold_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::uint32_t i : large) {
    threshold_[i] = 1.0;
    alias_[i] = i;
  }
  std::uint32_t fallback = 0;
  while (weights[fallback] == 0.0) ++fallback;
  for (std::uint32_t i : small) {
    threshold_[i] = weights[i] == 0.0 ? 0.0 : 1.0;
    alias_[i] = weights[i] == 0.0 ? fallback : i;
  }
}

std::size_t AliasTable::sample(Rng& rng) const {
  const std::size_t n = alias_.size();
  if (n == 1) return 0;
  const double scaled = rng.uniform() * static_cast<double>(n);
  auto column = static_cast<std::size_t>(scaled);
  if (column >= n) column = n - 1;
  const double coin = scaled - static_cast<double>(column);
  return coin < threshold_[column] ? column : alias_[column];
}

}  // namespace hmmstein
