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

#ifndef HMMSTEIN_GERM_GRAIN_HPP_
#define HMMSTEIN_GERM_GRAIN_HPP_

// Boolean model with HMM-driven germs in the cube E_n = [0, n^{1/d}]^d and
// ball grains. Each hidden state carries a two-cell density: E_n is split along
// the first axis at its midpoint and state s puts mass w_s on the lower half.
// The observed symbol of step i is the cell of germ i; its mark fixes the
// position inside the cell.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hmmstein/clt.hpp"
#include "hmmstein/functional.hpp"
#include "hmmstein/hmm.hpp"
#include "hmmstein/random.hpp"
#include "hmmstein/stats.hpp"

namespace hmmstein::germ_grain {

// Volume of the unit ball in R^d.
double unit_ball_volume(std::size_t d);

struct GermGrainConfig {
  std::size_t dimension = 2;
  std::size_t n = 1;
  // Mass of the lower half-cube for each hidden state.
  std::vector<double> cell_weights = {0.5};
  double c_m = 1.0;
  double c_M = 1.0;
  double volume_min = 0.5;  // V1
  double volume_max = 1.5;  // V2
  // Per-germ radii; empty means every grain has volume (V1 + V2) / 2.
  std::vector<double> radii;

  double side() const;
  double window_volume() const { return static_cast<double>(n); }
  double default_radius() const;
  double radius(std::size_t k) const { return radii.empty() ? default_radius() : radii[k]; }
};

// Checks the density sandwich c_m <= 2 w_s, 2 (1 - w_s) <= c_M and the grain
// volume range. Throws InvalidArgument.
void validate_config(const GermGrainConfig& config);

// The model with Q replaced by the cell weights (two symbols).
HmmSpec cell_spec(const GermGrainConfig& config, const HmmSpec& base);

struct GermGrainSample {
  std::size_t dimension = 0;
  std::vector<double> germs;  // flat, n * dimension
  std::vector<double> radii;
  std::vector<State> hidden;

  std::size_t size() const noexcept { return radii.size(); }
  std::span<const double> germ(std::size_t k) const {
    return std::span<const double>(germs).subspan(k * dimension, dimension);
  }
};

// Germ position for a cell symbol and mark, uniform inside the half-cube.
void place_germ(std::size_t dimension, double side, Symbol cell, std::uint64_t mark,
                std::span<double> out);

GermGrainSample sample_from_observation(const GermGrainConfig& config, const ObservedView& x);

// Throws StateMismatch if the model and the config disagree on |S|.
GermGrainSample sample_germs(const GermGrainConfig& config, const HmmSpec& spec, Rng& rng);

// Vol(union of balls inside E_n) from M uniform points; binomial standard error.
Estimate covered_volume(const GermGrainSample& sample, std::size_t points, Rng& rng);
// Same with a caller-supplied flat point set in E_n.
Estimate covered_volume_at(const GermGrainSample& sample, double side,
                           std::span<const double> points);

// Number of grains k with |C_k - C_j| > r_k + r_j for every j != k. Balls
// centred in the convex window that overlap at all overlap inside it, so no
// clipping is needed.
std::size_t isolated_count(const GermGrainSample& sample);

// f_V with a fixed point set drawn from `point_seed`, so that the functional
// is a deterministic map of the observations.
Functional volume_functional(const GermGrainConfig& config, std::size_t points, Seed point_seed);
Functional isolated_functional(const GermGrainConfig& config);

enum class GrainFunctional { Volume, Isolated };

// Model for each n: config.n is replaced by n (per-germ radii must then be
// empty), f_V uses points_per_volume * n fixed points from `point_seed`.
ModelFactory germ_grain_model(const GermGrainConfig& config, const HmmSpec& spec,
                              GrainFunctional which, std::size_t points_per_volume,
                              Seed point_seed);

}  // namespace hmmstein::germ_grain

#endif  // HMMSTEIN_GERM_GRAIN_HPP_
