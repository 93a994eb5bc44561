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

#include "hmmstein/spatial_grid.hpp"

#include <limits>

#include "hmmstein/error.hpp"

namespace hmmstein {

namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 22;

}  // namespace

SpatialGrid::SpatialGrid(std::size_t dimension, double extent, std::span<const double> points,
                         double cell_size)
    : dim_(dimension), count_(dimension ? points.size() / dimension : 0), extent_(extent),
      points_(points) {
  if (dim_ == 0 || dim_ > kMaxDimension)
    fail(ErrorCode::BadDimensions, "grid dimension must lie in 1..8");
  if (points.size() % dim_ != 0) fail(ErrorCode::BadDimensions, "ragged point array");
  if (!(extent > 0.0)) fail(ErrorCode::InvalidArgument, "grid extent must be positive");
  const double wanted = std::max(cell_size, extent * 1e-9);
  auto per_axis = static_cast<std::size_t>(std::max(1.0, std::floor(extent / wanted)));
  // Cap the total number of cells.
  const auto cap = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(kMaxCells), 1.0 / static_cast<double>(dim_))));
  per_axis = std::min(per_axis, std::max<std::size_t>(cap, 1));
  per_axis_ = per_axis;
  cell_size_ = extent / static_cast<double>(per_axis_);

  std::size_t cells = 1;
  for (std::size_t k = 0; k < dim_; ++k) cells *= per_axis_;
  start_.assign(cells + 1, 0);
  std::vector<std::size_t> cell_index(count_);
  std::vector<std::size_t> at(dim_);
  for (std::size_t p = 0; p < count_; ++p) {
    for (std::size_t k = 0; k < dim_; ++k) at[k] = cell_of(points_[p * dim_ + k]);
    cell_index[p] = linear(at);
    ++start_[cell_index[p] + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) start_[c + 1] += start_[c];
  order_.resize(count_);
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t p = 0; p < count_; ++p) order_[fill[cell_index[p]]++] = p;
}

std::size_t SpatialGrid::cell_of(double x) const {
  if (!(x > 0.0)) return 0;
  const double c = std::floor(x / cell_size_);
  if (c >= static_cast<double>(per_axis_ - 1)) return per_axis_ - 1;
  return static_cast<std::size_t>(c);
}

std::size_t SpatialGrid::linear(std::span<const std::size_t> cell) const {
  std::size_t index = 0;
  for (std::size_t k = dim_; k-- > 0;) index = index * per_axis_ + cell[k];
  return index;
}

std::size_t SpatialGrid::nearest(std::span<const double> y) const {
  if (count_ == 0) fail(ErrorCode::EmptyNuclei, "nearest point in an empty set");
  std::array<std::size_t, kMaxDimension> home{};
  for (std::size_t k = 0; k < dim_; ++k) home[k] = cell_of(y[k]);
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best = count_;
  std::array<long, kMaxDimension> offset{};
  std::array<std::size_t, kMaxDimension> cell{};
  const long max_ring = static_cast<long>(per_axis_);
  for (long ring = 0; ring <= max_ring; ++ring) {
    // Any point in ring r+1 or beyond is at least r * cell_size away.
    if (ring > 0) {
      const double reach = static_cast<double>(ring - 1) * cell_size_ * (1.0 - 1e-12);
      if (best < count_ && best_d2 < reach * reach) break;
    }
    std::fill(offset.begin(), offset.begin() + static_cast<long>(dim_), -ring);
    while (true) {
      long chebyshev = 0;
      bool inside = true;
      for (std::size_t k = 0; k < dim_; ++k) {
        chebyshev = std::max(chebyshev, std::labs(offset[k]));
        const long c = static_cast<long>(home[k]) + offset[k];
        if (c < 0 || c >= static_cast<long>(per_axis_)) inside = false;
        else cell[k] = static_cast<std::size_t>(c);
      }
      if (inside && chebyshev == ring) {
        const std::size_t c = linear(std::span<const std::size_t>(cell.data(), dim_));
        for (std::size_t q = start_[c]; q < start_[c + 1]; ++q) {
          const std::size_t p = order_[q];
          const double d2 = squared_distance(y, point(p));
          if (d2 < best_d2 || (d2 == best_d2 && p < best)) {
            best_d2 = d2;
            best = p;
          }
        }
      }
      std::size_t k = 0;
      while (k < dim_ && offset[k] == ring) {
        offset[k] = -ring;
        ++k;
      }
      if (k == dim_) break;
      ++offset[k];
    }
  }
  return best;
}

std::size_t nearest_brute_force(std::span<const double> y, std::span<const double> points,
                                std::size_t dimension) {
  const std::size_t count = points.size() / dimension;
  if (count == 0) fail(ErrorCode::EmptyNuclei, "nearest point in an empty set");
  std::size_t best = 0;
  double best_d2 = squared_distance(y, points.subspan(0, dimension));
  for (std::size_t p = 1; p < count; ++p) {
    const double d2 = squared_distance(y, points.subspan(p * dimension, dimension));
    if (d2 < best_d2) {
      best_d2 = d2;
      best = p;
    }
  }
  return best;
}

}  // namespace hmmstein
