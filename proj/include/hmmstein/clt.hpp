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

#ifndef HMMSTEIN_CLT_HPP_
#define HMMSTEIN_CLT_HPP_

// Replicate harness shared by the applications: for each n on a grid, draw
// independent observation sequences, evaluate a functional and summarize.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hmmstein/functional.hpp"
#include "hmmstein/hmm.hpp"
#include "hmmstein/random.hpp"
#include "hmmstein/stats.hpp"

namespace hmmstein {

struct Model {
  HmmSpec spec;
  Functional functional;
};

// The model may depend on n (occupancy rescales its alphabet, the spatial
// applications rescale their window).
using ModelFactory = std::function<Model(std::size_t n)>;

struct CltPoint {
  std::size_t n = 0;
  std::vector<double> values;  // one per replicate, in replicate order
  EmpiricalSummary summary;
  double dkw_width = 0.0;
};

// Replicate r at length n uses seed.derive({n, r}). Throws InvalidArgument if
// the grid is not strictly increasing or replicates < 2.
std::vector<CltPoint> run_clt(const ModelFactory& model, std::span<const std::size_t> n_grid,
                              std::size_t replicates, Seed seed, std::size_t threads = 1,
                              std::span<const double> moment_orders = {});

void validate_grid(std::span<const std::size_t> n_grid);

}  // namespace hmmstein

#endif  // HMMSTEIN_CLT_HPP_
