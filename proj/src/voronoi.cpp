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

#include "hmmstein/voronoi.hpp"

#include <algorithm>
#include <cmath>

#include "hmmstein/error.hpp"
#include "hmmstein/germ_grain.hpp"

namespace hmmstein::voronoi {

namespace {

germ_grain::GermGrainConfig as_germ_config(const VoronoiConfig& config) {
  germ_grain::GermGrainConfig g;
  g.dimension = config.dimension;
  g.n = std::max<std::size_t>(config.n, 1);
  g.cell_weights = config.cell_weights;
  g.c_m = config.c_m;
  g.c_M = config.c_M;
  return g;
}

}  // namespace

RegionPredicate RegionPredicate::ball(std::vector<double> center, double radius) {
  if (center.empty()) fail(ErrorCode::BadDimensions, "ball centre needs a coordinate");
  if (!(radius >= 0.0)) fail(ErrorCode::InvalidArgument, "ball radius must be non-negative");
  RegionPredicate k(Kind::Ball, center.size());
  k.a_ = std::move(center);
  k.radius_ = radius;
  bool inside = true;
  for (double c : k.a_) inside = inside && c - radius >= 0.0 && c + radius <= 1.0;
  if (inside)
    k.volume_ = germ_grain::unit_ball_volume(k.dim_) *
                std::pow(radius, static_cast<double>(k.dim_));
  return k;
}

RegionPredicate RegionPredicate::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size())
    fail(ErrorCode::BadDimensions, "box corners must have the same positive dimension");
  double volume = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(lo[k] <= hi[k])) fail(ErrorCode::InvalidArgument, "box needs lo <= hi");
    volume *= std::max(0.0, std::min(hi[k], 1.0) - std::max(lo[k], 0.0));
  }
  RegionPredicate k(Kind::Box, lo.size());
  k.a_ = std::move(lo);
  k.b_ = std::move(hi);
  k.volume_ = volume;
  return k;
}

RegionPredicate RegionPredicate::full_cube(std::size_t dimension) {
  if (dimension == 0) fail(ErrorCode::BadDimensions, "cube dimension must be positive");
  RegionPredicate k(Kind::FullCube, dimension);
  k.volume_ = 1.0;
  return k;
}

bool RegionPredicate::contains(std::span<const double> y) const {
  switch (kind_) {
    case Kind::Ball:
      return squared_distance(y, a_) <= radius_ * radius_;
    case Kind::Box:
      for (std::size_t k = 0; k < dim_; ++k)
        if (y[k] < a_[k] || y[k] > b_[k]) return false;
      return true;
    case Kind::FullCube:
      break;
  }
  return true;
}

const char* kind_name(RegionPredicate::Kind kind) {
  switch (kind) {
    case RegionPredicate::Kind::Ball: return "ball";
    case RegionPredicate::Kind::Box: return "box";
    case RegionPredicate::Kind::FullCube: return "full-cube";
  }
  return "unknown";
}

void validate_config(const VoronoiConfig& config) {
  if (config.points == 0) fail(ErrorCode::InsufficientSamples, "phi needs at least one point");
  germ_grain::validate_config(as_germ_config(config));
}

HmmSpec cell_spec(const VoronoiConfig& config, const HmmSpec& base) {
  return germ_grain::cell_spec(as_germ_config(config), base);
}

std::vector<double> nuclei_from_observation(std::size_t dimension, const ObservedView& x) {
  std::vector<double> nuclei(x.size() * dimension);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x.symbols[k] > 1) fail(ErrorCode::SymbolOutOfRange, "nucleus cell symbol must be 0 or 1");
    germ_grain::place_germ(dimension, 1.0, x.symbols[k], x.marks[k],
                           std::span<double>(nuclei).subspan(k * dimension, dimension));
  }
  return nuclei;
}

std::vector<double> sample_nuclei(const VoronoiConfig& config, const HmmSpec& spec, Rng& rng) {
  validate_config(config);
  if (config.n == 0) fail(ErrorCode::EmptyNuclei, "no nuclei requested");
  const Trajectory t = reconstruct(sample_instructions(cell_spec(config, spec), config.n, rng));
  return nuclei_from_observation(config.dimension, observed_view(t));
}

std::size_t nearest_nucleus(std::span<const double> y, std::span<const double> nuclei,
                            std::size_t dimension) {
  if (dimension == 0) fail(ErrorCode::BadDimensions, "dimension must be positive");
  return nearest_brute_force(y, nuclei, dimension);
}

NucleusIndex::NucleusIndex(std::vector<double> nuclei, std::size_t dimension)
    : nuclei_(std::move(nuclei)) {
  if (dimension == 0) fail(ErrorCode::BadDimensions, "dimension must be positive");
  const std::size_t count = nuclei_.size() / dimension;
  if (count == 0) fail(ErrorCode::EmptyNuclei, "nearest point in an empty set");
  // About two nuclei per cell.
  const double cell = std::pow(2.0 / static_cast<double>(count), 1.0 / static_cast<double>(dimension));
  grid_ = std::make_unique<SpatialGrid>(dimension, 1.0, nuclei_, cell);
}

Estimate voronoi_volume_at(std::span<const double> nuclei, const RegionPredicate& region,
                           std::span<const double> points) {
  const std::size_t d = region.dimension();
  const std::size_t count = nuclei.size() / d;
  if (count == 0) fail(ErrorCode::EmptyNuclei, "phi of an empty nucleus set");
  const std::size_t m = points.size() / d;
  if (m == 0) fail(ErrorCode::InsufficientSamples, "phi needs at least one point");
  std::vector<char> in_region(count);
  bool all = true;
  for (std::size_t k = 0; k < count; ++k) {
    in_region[k] = region.contains(nuclei.subspan(k * d, d)) ? 1 : 0;
    all = all && in_region[k];
  }
  if (all) return {1.0, 0.0};
  std::size_t hits = 0;
  if (count <= 32) {
    for (std::size_t p = 0; p < m; ++p)
      hits += in_region[nearest_brute_force(points.subspan(p * d, d), nuclei, d)];
  } else {
    const NucleusIndex index(std::vector<double>(nuclei.begin(), nuclei.end()), d);
    for (std::size_t p = 0; p < m; ++p) hits += in_region[index.nearest(points.subspan(p * d, d))];
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(m);
  return {frac, std::sqrt(frac * (1.0 - frac) / static_cast<double>(m))};
}

Estimate voronoi_volume_estimate(std::span<const double> nuclei, const RegionPredicate& region,
                                 std::size_t points, Rng& rng) {
  if (points == 0) fail(ErrorCode::InsufficientSamples, "phi needs at least one point");
  if (nuclei.empty()) fail(ErrorCode::EmptyNuclei, "phi of an empty nucleus set");
  std::vector<double> pts(points * region.dimension());
  for (double& v : pts) v = rng.uniform();
  return voronoi_volume_at(nuclei, region, pts);
}

double voronoi_volume_exact_1d(std::span<const double> nuclei, const RegionPredicate& region) {
  if (region.dimension() != 1) fail(ErrorCode::BadDimensions, "exact phi is one-dimensional");
  if (nuclei.empty()) fail(ErrorCode::EmptyNuclei, "phi of an empty nucleus set");
  std::vector<double> x(nuclei.begin(), nuclei.end());
  std::sort(x.begin(), x.end());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!region.contains(std::span<const double>(&x[i], 1))) continue;
    const double left = i == 0 ? 0.0 : 0.5 * (x[i - 1] + x[i]);
    const double right = i + 1 == x.size() ? 1.0 : 0.5 * (x[i] + x[i + 1]);
    total += right - left;
  }
  return total;
}

Functional phi_functional(const VoronoiConfig& config, const RegionPredicate& region,
                          Seed point_seed) {
  validate_config(config);
  if (region.dimension() != config.dimension)
    fail(ErrorCode::BadDimensions, "region and config disagree on the dimension");
  Rng rng = point_seed.rng();
  auto pts = std::make_shared<std::vector<double>>(config.points * config.dimension);
  for (double& v : *pts) v = rng.uniform();
  const std::size_t d = config.dimension;
  return Functional("voronoi.phi", [d, region, pts](const ObservedView& x) {
    return voronoi_volume_at(nuclei_from_observation(d, x), region, *pts).value;
  });
}

Functional phi_exact_functional_1d(const RegionPredicate& region) {
  if (region.dimension() != 1) fail(ErrorCode::BadDimensions, "exact phi is one-dimensional");
  return Functional("voronoi.phi", [region](const ObservedView& x) {
    return voronoi_volume_exact_1d(nuclei_from_observation(1, x), region);
  });
}

ModelFactory voronoi_model(const VoronoiConfig& config, const HmmSpec& spec,
                           const RegionPredicate& region, Seed point_seed) {
  validate_config(config);
  const HmmSpec cells = cell_spec(config, spec);
  Functional phi = config.dimension == 1 ? phi_exact_functional_1d(region)
                                         : phi_functional(config, region, point_seed);
  return [cells, phi](std::size_t) { return Model{cells, phi}; };
}

std::vector<CltPoint> run_voronoi_clt(const VoronoiConfig& config, const HmmSpec& spec,
                                      const RegionPredicate& region,
                                      std::span<const std::size_t> n_grid,
                                      std::size_t replicates, Seed seed, std::size_t threads) {
  return run_clt(voronoi_model(config, spec, region, seed.derive(1)), n_grid, replicates,
                 seed.derive(2), threads, std::vector<double>{2.0});
}

}  // namespace hmmstein::voronoi
