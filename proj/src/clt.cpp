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

#include "hmmstein/clt.hpp"

#include "hmmstein/error.hpp"
#include "hmmstein/parallel.hpp"

namespace hmmstein {

void validate_grid(std::span<const std::size_t> n_grid) {
  if (n_grid.empty()) fail(ErrorCode::InvalidArgument, "empty n grid");
  if (n_grid.front() == 0) fail(ErrorCode::InvalidArgument, "grid lengths must be positive");
  for (std::size_t k = 1; k < n_grid.size(); ++k)
    if (n_grid[k] <= n_grid[k - 1])
      fail(ErrorCode::InvalidArgument, "n grid must be strictly increasing");
}

std::vector<CltPoint> run_clt(const ModelFactory& model, std::span<const std::size_t> n_grid,
                              std::size_t replicates, Seed seed, std::size_t threads,
                              std::span<const double> moment_orders) {
  validate_grid(n_grid);
  if (replicates < 2) fail(ErrorCode::InsufficientSamples, "at least 2 replicates are needed");
  std::vector<CltPoint> out;
  out.reserve(n_grid.size());
  for (std::size_t n : n_grid) {
    const Model m = model(n);
    const InstructionSampler sampler(m.spec);
    CltPoint point;
    point.n = n;
    point.values.resize(replicates);
    parallel_for(replicates, threads, [&](std::size_t r) {
      thread_local Trajectory path;
      Rng rng = seed.derive({n, r}).rng();
      sampler.sample_path(n, rng, path);
      point.values[r] = m.functional(path);
    });
    point.summary = summarize(point.values, moment_orders);
    point.dkw_width = dkw_width(replicates, kDkwDelta);
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace hmmstein
