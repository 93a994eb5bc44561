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

#ifndef HMMSTEIN_VORONOI_HPP_
#define HMMSTEIN_VORONOI_HPP_

// Voronoi approximation of a set K in [0,1]^d: K^X is the set of points whose
// nearest nucleus lies in K and phi(X) = Vol(K^X). Nuclei follow the same
// two-cell family as the germ-grain model, on the unit cube.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmstein/clt.hpp"
#include "hmmstein/functional.hpp"
#include "hmmstein/hmm.hpp"
#include "hmmstein/random.hpp"
#include "hmmstein/spatial_grid.hpp"
#include "hmmstein/stats.hpp"

namespace hmmstein::voronoi {

class RegionPredicate {
 public:
  enum class Kind { Ball, Box, FullCube };

  static RegionPredicate ball(std::vector<double> center, double radius);
  static RegionPredicate box(std::vector<double> lo, std::vector<double> hi);
  static RegionPredicate full_cube(std::size_t dimension);

  Kind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<double>& center() const noexcept { return a_; }
  double radius() const noexcept { return radius_; }
  const std::vector<double>& lo() const noexcept { return a_; }
  const std::vector<double>& hi() const noexcept { return b_; }

  bool contains(std::span<const double> y) const;
  // Vol(K) when it has a closed form: boxes, the cube, balls inside the cube.
  std::optional<double> exact_volume() const noexcept { return volume_; }

 private:
  RegionPredicate(Kind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  std::size_t dim_;
  std::vector<double> a_, b_;
  double radius_ = 0.0;
  std::optional<double> volume_;
};

const char* kind_name(RegionPredicate::Kind kind);

struct VoronoiConfig {
  std::size_t dimension = 2;
  std::size_t n = 1;
  std::size_t points = 10000;  // M
  std::vector<double> cell_weights = {0.5};
  double c_m = 1.0;
  double c_M = 1.0;
};

void validate_config(const VoronoiConfig& config);

// The model with Q replaced by the cell weights (two symbols).
HmmSpec cell_spec(const VoronoiConfig& config, const HmmSpec& base);

// Flat nucleus array (n * d) in [0,1]^d.
std::vector<double> nuclei_from_observation(std::size_t dimension, const ObservedView& x);
std::vector<double> sample_nuclei(const VoronoiConfig& config, const HmmSpec& spec, Rng& rng);

// Brute force, ties to the smallest index. Throws EmptyNuclei.
std::size_t nearest_nucleus(std::span<const double> y, std::span<const double> nuclei,
                            std::size_t dimension);

// Grid index over a copy of the nuclei; nearest() matches nearest_nucleus
// exactly.
class NucleusIndex {
 public:
  NucleusIndex(std::vector<double> nuclei, std::size_t dimension);
  NucleusIndex(const NucleusIndex&) = delete;
  NucleusIndex& operator=(const NucleusIndex&) = delete;

  std::size_t size() const noexcept { return grid_->point_count(); }
  std::size_t nearest(std::span<const double> y) const { return grid_->nearest(y); }

 private:
  std::vector<double> nuclei_;
  std::unique_ptr<SpatialGrid> grid_;
};

// Fraction of the given points (flat, in [0,1]^d) whose nearest nucleus lies
// in K, with its binomial standard error.
Estimate voronoi_volume_at(std::span<const double> nuclei, const RegionPredicate& region,
                           std::span<const double> points);
// Same with M fresh uniform points.
Estimate voronoi_volume_estimate(std::span<const double> nuclei, const RegionPredicate& region,
                                 std::size_t points, Rng& rng);
// Exact phi for d = 1: cell of each sorted nucleus runs between the midpoints
// to its neighbours (0 and 1 at the ends).
double voronoi_volume_exact_1d(std::span<const double> nuclei, const RegionPredicate& region);

// phi with a fixed point set drawn from `point_seed`.
Functional phi_functional(const VoronoiConfig& config, const RegionPredicate& region,
                          Seed point_seed);
// Exact phi for d = 1.
Functional phi_exact_functional_1d(const RegionPredicate& region);

ModelFactory voronoi_model(const VoronoiConfig& config, const HmmSpec& spec,
                           const RegionPredicate& region, Seed point_seed);

std::vector<CltPoint> run_voronoi_clt(const VoronoiConfig& config, const HmmSpec& spec,
                                      const RegionPredicate& region,
                                      std::span<const std::size_t> n_grid,
                                      std::size_t replicates, Seed seed, std::size_t threads = 1);

}  // namespace hmmstein::voronoi

#endif  // HMMSTEIN_VORONOI_HPP_
