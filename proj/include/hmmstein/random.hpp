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

#ifndef HMMSTEIN_RANDOM_HPP_
#define HMMSTEIN_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace hmmstein {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
inline double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Pseudo-random stream. Every stream in the library is created from a Seed so
// that replicate k of an experiment always sees the same numbers, no matter
// which worker thread runs it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return to_unit(engine_()); }
  // Uniform integer in [0, bound). bound must be positive.
  std::size_t below(std::size_t bound);

  using result_type = std::uint64_t;
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Counter-derived seed: derive(k) yields an independent child for any k, and
// the mapping is a pure function of (parent, k).
class Seed {
 public:
  constexpr explicit Seed(std::uint64_t value = 0) : value_(value) {}

  Seed derive(std::uint64_t id) const noexcept;
  Seed derive(std::initializer_list<std::uint64_t> path) const noexcept;
  Rng rng() const { return Rng(splitmix64(value_ ^ 0x6a09e667f3bcc909ULL)); }
  std::uint64_t value() const noexcept { return value_; }

 private:
  std::uint64_t value_;
};

// Walker alias table for O(1) draws from a finite distribution.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const noexcept { return alias_.size(); }
  // Draws one outcome; single-outcome tables consume no randomness.
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> threshold_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace hmmstein

#endif  // HMMSTEIN_RANDOM_HPP_
