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

#include "hmmstein/occupancy.hpp"

#include <cmath>

#include "hmmstein/error.hpp"

namespace hmmstein::occupancy {

const char* family_name(Family family) {
  return family == Family::Uniform ? "uniform" : "blocks";
}

Family parse_family(const std::string& name) {
  if (name == "uniform") return Family::Uniform;
  if (name == "blocks") return Family::Blocks;
  fail(ErrorCode::ConfigParse, "unknown occupancy family '" + name + "'");
}

std::size_t OccupancyConfig::letters(std::size_t n) const {
  return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
}

void validate_config(const OccupancyConfig& config) {
  if (!(config.alpha > 0.0) || !std::isfinite(config.alpha))
    fail(ErrorCode::InvalidArgument, "alpha must be a positive real");
  if (config.family == Family::Blocks && !(config.coverage > 0.0 && config.coverage <= 1.0))
    fail(ErrorCode::InvalidArgument, "block coverage must lie in (0, 1]");
}

std::vector<Block> letter_blocks(const OccupancyConfig& config, std::size_t num_states,
                                 std::size_t letters) {
  std::vector<Block> blocks(num_states);
  if (config.family == Family::Uniform) {
    for (auto& b : blocks) b = {0, letters};
    return blocks;
  }
  const auto length = std::min<std::size_t>(
      letters, std::max<std::size_t>(1, static_cast<std::size_t>(
                                            std::ceil(config.coverage * static_cast<double>(letters)))));
  const std::size_t room = letters - length;
  for (std::size_t s = 0; s < num_states; ++s) {
    const double t = num_states == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(num_states - 1);
    blocks[s] = {static_cast<std::size_t>(std::llround(t * static_cast<double>(room))), length};
  }
  std::size_t covered = 0;
  for (const Block& b : blocks) {
    if (b.start > covered) break;
    covered = std::max(covered, b.start + b.length);
  }
  if (covered < letters)
    fail(ErrorCode::InvalidArgument, "letter blocks leave some letters uncovered");
  return blocks;
}

HmmSpec occupancy_spec(const OccupancyConfig& config, const HmmSpec& base, std::size_t n) {
  validate_config(config);
  const std::size_t letters = config.letters(n);
  if (letters == 0) fail(ErrorCode::InvalidArgument, "floor(alpha n) must be at least 1");
  const std::vector<Block> blocks = letter_blocks(config, base.num_states, letters);
  HmmSpec spec = base;
  spec.num_symbols = letters;
  spec.emission = Matrix(base.num_states, letters);
  for (std::size_t s = 0; s < base.num_states; ++s) {
    const double p = 1.0 / static_cast<double>(blocks[s].length);
    for (std::size_t x = 0; x < blocks[s].length; ++x) spec.emission(s, blocks[s].start + x) = p;
  }
  return spec;
}

std::size_t occupancy_count(std::span<const Symbol> symbols, std::size_t letters) {
  std::vector<char> seen(letters, 0);
  std::size_t distinct = 0;
  for (Symbol x : symbols) {
    if (x >= letters) fail(ErrorCode::SymbolOutOfRange, "symbol outside the alphabet");
    distinct += seen[x] ? 0 : 1;
    seen[x] = 1;
  }
  return letters - distinct;
}

Functional occupancy_functional(std::size_t letters) {
  return Functional(
      "occupancy.W",
      [letters](const ObservedView& x) {
        return static_cast<double>(occupancy_count(x.symbols, letters));
      },
      1.0);
}

ModelFactory occupancy_model(const OccupancyConfig& config, const HmmSpec& spec) {
  validate_config(config);
  validate_spec(spec);
  return [config, spec](std::size_t n) {
    return Model{occupancy_spec(config, spec, n), occupancy_functional(config.letters(n))};
  };
}

std::vector<CltPoint> run_occupancy_clt(const OccupancyConfig& config, const HmmSpec& spec,
                                        std::span<const std::size_t> n_grid,
                                        std::size_t replicates, Seed seed, std::size_t threads) {
  return run_clt(occupancy_model(config, spec), n_grid, replicates, seed, threads,
                 std::vector<double>{2.0});
}

}  // namespace hmmstein::occupancy
