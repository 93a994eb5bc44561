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

#include "hmmstein/germ_grain.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "hmmstein/error.hpp"
#include "hmmstein/spatial_grid.hpp"

namespace hmmstein::germ_grain {

double unit_ball_volume(std::size_t d) {
  const double half = static_cast<double>(d) / 2.0;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double GermGrainConfig::side() const {
  return std::pow(static_cast<double>(n), 1.0 / static_cast<double>(dimension));
}

double GermGrainConfig::default_radius() const {
  const double volume = 0.5 * (volume_min + volume_max);
  return std::pow(volume / unit_ball_volume(dimension), 1.0 / static_cast<double>(dimension));
}

void validate_config(const GermGrainConfig& config) {
  if (config.dimension == 0) fail(ErrorCode::BadDimensions, "dimension must be positive");
  if (config.n == 0) fail(ErrorCode::InvalidArgument, "germ count must be positive");
  if (config.cell_weights.empty()) fail(ErrorCode::BadDimensions, "no state measures");
  if (!(config.c_m > 0.0 && config.c_m <= config.c_M))
    fail(ErrorCode::InvalidArgument, "density bounds need 0 < c_m <= c_M");
  for (double w : config.cell_weights) {
    if (!(w > 0.0 && w < 1.0)) fail(ErrorCode::InvalidArgument, "cell weight must lie in (0,1)");
    const double lo = 2.0 * std::min(w, 1.0 - w), hi = 2.0 * std::max(w, 1.0 - w);
    if (lo < config.c_m - 1e-12 || hi > config.c_M + 1e-12)
      fail(ErrorCode::InvalidArgument, "cell weight violates the density bounds");
  }
  if (!(config.volume_min > 0.0 && config.volume_min <= config.volume_max))
    fail(ErrorCode::InvalidArgument, "grain volume range needs 0 < V1 <= V2");
  if (!config.radii.empty()) {
    if (config.radii.size() != config.n) fail(ErrorCode::BadDimensions, "one radius per germ");
    const double kappa = unit_ball_volume(config.dimension);
    for (double r : config.radii) {
      const double v = kappa * std::pow(r, static_cast<double>(config.dimension));
      if (!(r > 0.0) || v < config.volume_min || v > config.volume_max)
        fail(ErrorCode::InvalidArgument, "grain volume outside [V1, V2]");
    }
  }
}

HmmSpec cell_spec(const GermGrainConfig& config, const HmmSpec& base) {
  if (base.num_states != config.cell_weights.size())
    fail(ErrorCode::StateMismatch, "model and germ-grain config disagree on the number of states");
  HmmSpec spec = base;
  spec.num_symbols = 2;
  spec.emission = Matrix(spec.num_states, 2);
  for (std::size_t s = 0; s < spec.num_states; ++s) {
    spec.emission(s, 0) = config.cell_weights[s];
    spec.emission(s, 1) = 1.0 - config.cell_weights[s];
  }
  validate_spec(spec);
  return spec;
}

void place_germ(std::size_t dimension, double side, Symbol cell, std::uint64_t mark,
                std::span<double> out) {
  std::uint64_t state = mark;
  for (std::size_t k = 0; k < dimension; ++k) {
    state = splitmix64(state);
    const double u = to_unit(state);
    out[k] = k == 0 ? side * (static_cast<double>(cell) + u) / 2.0 : side * u;
  }
}

GermGrainSample sample_from_observation(const GermGrainConfig& config, const ObservedView& x) {
  GermGrainSample s;
  s.dimension = config.dimension;
  const std::size_t n = x.size();
  const double side = std::pow(static_cast<double>(n), 1.0 / static_cast<double>(config.dimension));
  s.germs.resize(n * config.dimension);
  s.radii.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (x.symbols[k] > 1) fail(ErrorCode::SymbolOutOfRange, "germ cell symbol must be 0 or 1");
    place_germ(config.dimension, side, x.symbols[k], x.marks[k],
               std::span<double>(s.germs).subspan(k * config.dimension, config.dimension));
    s.radii[k] = config.radius(k);
  }
  return s;
}

GermGrainSample sample_germs(const GermGrainConfig& config, const HmmSpec& spec, Rng& rng) {
  validate_config(config);
  const HmmSpec cells = cell_spec(config, spec);
  const Trajectory t = reconstruct(sample_instructions(cells, config.n, rng));
  GermGrainSample s = sample_from_observation(config, observed_view(t));
  s.hidden = t.hidden;
  return s;
}

namespace {

double max_radius(const GermGrainSample& sample) {
  return sample.radii.empty() ? 0.0 : *std::max_element(sample.radii.begin(), sample.radii.end());
}

double side_of(const GermGrainSample& sample) {
  return std::pow(static_cast<double>(sample.size()), 1.0 / static_cast<double>(sample.dimension));
}

}  // namespace

Estimate covered_volume_at(const GermGrainSample& sample, double side,
                           std::span<const double> points) {
  const std::size_t d = sample.dimension;
  const std::size_t count = points.size() / d;
  if (count == 0) fail(ErrorCode::InsufficientSamples, "covered volume needs at least one point");
  const double r_max = max_radius(sample);
  const SpatialGrid grid(d, side, sample.germs, 2.0 * r_max);
  std::size_t hits = 0;
  for (std::size_t p = 0; p < count; ++p) {
    const auto y = points.subspan(p * d, d);
    bool covered = false;
    grid.for_each_candidate(y, r_max, [&](std::size_t k) {
      const double r = sample.radii[k];
      covered = squared_distance(y, sample.germ(k)) <= r * r;
      return !covered;
    });
    hits += covered ? 1 : 0;
  }
  const double volume = std::pow(side, static_cast<double>(d));
  const double frac = static_cast<double>(hits) / static_cast<double>(count);
  return {volume * frac, volume * std::sqrt(frac * (1.0 - frac) / static_cast<double>(count))};
}

namespace {

std::vector<double> uniform_points(std::size_t d, double side, std::size_t count, Rng& rng) {
  std::vector<double> pts(count * d);
  for (double& v : pts) v = side * rng.uniform();
  return pts;
}

}  // namespace

Estimate covered_volume(const GermGrainSample& sample, std::size_t points, Rng& rng) {
  if (points == 0) fail(ErrorCode::InsufficientSamples, "covered volume needs at least one point");
  if (sample.size() == 0) fail(ErrorCode::InvalidArgument, "empty germ-grain sample");
  const double side = side_of(sample);
  const std::vector<double> pts = uniform_points(sample.dimension, side, points, rng);
  return covered_volume_at(sample, side, pts);
}

std::size_t isolated_count(const GermGrainSample& sample) {
  const std::size_t n = sample.size();
  if (n == 0) return 0;
  const double r_max = max_radius(sample);
  const SpatialGrid grid(sample.dimension, side_of(sample), sample.germs, 2.0 * r_max);
  std::size_t isolated = 0;
  for (std::size_t k = 0; k < n; ++k) {
    bool alone = true;
    grid.for_each_candidate(sample.germ(k), sample.radii[k] + r_max, [&](std::size_t j) {
      if (j == k) return true;
      const double reach = sample.radii[k] + sample.radii[j];
      if (squared_distance(sample.germ(k), sample.germ(j)) <= reach * reach) alone = false;
      return alone;
    });
    isolated += alone ? 1 : 0;
  }
  return isolated;
}

Functional volume_functional(const GermGrainConfig& config, std::size_t points, Seed point_seed) {
  validate_config(config);
  if (points == 0) fail(ErrorCode::InsufficientSamples, "covered volume needs at least one point");
  Rng rng = point_seed.rng();
  auto pts = std::make_shared<const std::vector<double>>(
      uniform_points(config.dimension, config.side(), points, rng));
  return Functional(
      "germ_grain.f_V",
      [config, pts](const ObservedView& x) {
        const GermGrainSample s = sample_from_observation(config, x);
        return covered_volume_at(s, config.side(), *pts).value;
      });
}

Functional isolated_functional(const GermGrainConfig& config) {
  validate_config(config);
  return Functional(
      "germ_grain.f_I",
      [config](const ObservedView& x) {
        return static_cast<double>(isolated_count(sample_from_observation(config, x)));
      },
      1.0);
}

ModelFactory germ_grain_model(const GermGrainConfig& config, const HmmSpec& spec,
                              GrainFunctional which, std::size_t points_per_volume,
                              Seed point_seed) {
  validate_config(config);
  if (!config.radii.empty())
    fail(ErrorCode::InvalidArgument, "per-germ radii cannot follow a grid of n");
  const HmmSpec cells = cell_spec(config, spec);
  return [config, cells, which, points_per_volume, point_seed](std::size_t n) {
    GermGrainConfig at = config;
    at.n = n;
    Functional f = which == GrainFunctional::Volume
                       ? volume_functional(at, points_per_volume * n, point_seed.derive(n))
                       : isolated_functional(at);
    return Model{cells, std::move(f)};
  };
}

}  // namespace hmmstein::germ_grain
