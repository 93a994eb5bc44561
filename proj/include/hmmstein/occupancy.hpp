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

#ifndef HMMSTEIN_OCCUPANCY_HPP_
#define HMMSTEIN_OCCUPANCY_HPP_

// Occupancy count: W is the number of letters among L = floor(alpha n) that
// never appear in X_1, ..., X_n, with the letter law chosen by the hidden state.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hmmstein/clt.hpp"
#include "hmmstein/functional.hpp"
#include "hmmstein/hmm.hpp"
#include "hmmstein/random.hpp"

namespace hmmstein::occupancy {

enum class Family {
  // Every state draws uniformly from all L letters.
  Uniform,
  // State s draws uniformly from a contiguous block of ceil(coverage L)
  // letters; block starts are evenly spaced so the blocks cover every letter.
  Blocks,
};

const char* family_name(Family family);
Family parse_family(const std::string& name);  // throws ConfigParse

struct OccupancyConfig {
  double alpha = 1.0;
  Family family = Family::Uniform;
  double coverage = 0.75;

  std::size_t letters(std::size_t n) const;
};

void validate_config(const OccupancyConfig& config);

// Block [start, start + length) of letters used by state s.
struct Block {
  std::size_t start = 0;
  std::size_t length = 0;
};
std::vector<Block> letter_blocks(const OccupancyConfig& config, std::size_t num_states,
                                 std::size_t letters);

// The model with Q replaced by the family's letter laws over L(n) letters.
// Throws InvalidArgument if L(n) = 0 or the blocks leave a letter uncovered.
HmmSpec occupancy_spec(const OccupancyConfig& config, const HmmSpec& base, std::size_t n);

// W = L - #distinct symbols. Throws SymbolOutOfRange.
std::size_t occupancy_count(std::span<const Symbol> symbols, std::size_t letters);

// W as a functional, Lipschitz with c = 1.
Functional occupancy_functional(std::size_t letters);

ModelFactory occupancy_model(const OccupancyConfig& config, const HmmSpec& spec);

std::vector<CltPoint> run_occupancy_clt(const OccupancyConfig& config, const HmmSpec& spec,
                                        std::span<const std::size_t> n_grid,
                                        std::size_t replicates, Seed seed,
                                        std::size_t threads = 1);

}  // namespace hmmstein::occupancy

#endif  // HMMSTEIN_OCCUPANCY_HPP_
