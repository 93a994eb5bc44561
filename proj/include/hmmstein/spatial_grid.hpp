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

#ifndef HMMSTEIN_SPATIAL_GRID_HPP_
#define HMMSTEIN_SPATIAL_GRID_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hmmstein {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    d2 += diff * diff;
  }
  return d2;
}

// Uniform bucket grid over [0, extent]^d holding a flat array of points
// (point p occupies coordinates [p*d, (p+1)*d)). The grid refers to the
// caller's array, which must outlive it.
class SpatialGrid {
 public:
  static constexpr std::size_t kMaxDimension = 8;

  SpatialGrid(std::size_t dimension, double extent, std::span<const double> points,
              double cell_size);

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t point_count() const noexcept { return count_; }
  std::span<const double> point(std::size_t p) const { return points_.subspan(p * dim_, dim_); }

  // Index of the closest point to y, ties to the smallest index. Identical to
  // a brute-force scan in exact arithmetic and in floating point.
  std::size_t nearest(std::span<const double> y) const;

  // Calls fn(p) for every point p in a cell that meets the box around `center`
  // of half-width `radius`; fn returns false to stop early. Callers filter by
  // exact distance.
  template <typename Fn>
  void for_each_candidate(std::span<const double> center, double radius, Fn&& fn) const {
    std::array<std::size_t, kMaxDimension> lo{}, hi{}, at{};
    for (std::size_t k = 0; k < dim_; ++k) {
      lo[k] = cell_of(center[k] - radius);
      hi[k] = cell_of(center[k] + radius);
      at[k] = lo[k];
    }
    while (true) {
      const std::size_t c = linear(std::span<const std::size_t>(at.data(), dim_));
      for (std::size_t q = start_[c]; q < start_[c + 1]; ++q)
        if (!fn(order_[q])) return;
      std::size_t k = 0;
      while (k < dim_ && at[k] == hi[k]) {
        at[k] = lo[k];
        ++k;
      }
      if (k == dim_) break;
      ++at[k];
    }
  }

 private:
  std::size_t cell_of(double x) const;
  std::size_t linear(std::span<const std::size_t> cell) const;

  std::size_t dim_;
  std::size_t count_;
  double extent_;
  double cell_size_;
  std::size_t per_axis_;
  std::span<const double> points_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

// Brute-force nearest point, ties to the smallest index.
std::size_t nearest_brute_force(std::span<const double> y, std::span<const double> points,
                                std::size_t dimension);

}  // namespace hmmstein

#endif  // HMMSTEIN_SPATIAL_GRID_HPP_
