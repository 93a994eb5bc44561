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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hmmstein/error.hpp"
#include "hmmstein/random.hpp"
#include "hmmstein/voronoi.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hmmstein;
using namespace hmmstein::voronoi;
using hmmstein::testing::binomial_se;
using hmmstein::testing::code_of;
using hmmstein::testing::two_state;
using hmmstein::testing::voronoi_1d_z;
using hmmstein::testing::within;

namespace {

std::vector<double> uniform(std::size_t count, Rng& rng) {
  std::vector<double> v(count);
  for (double& x : v) x = rng.uniform();
  return v;
}

RegionPredicate interval(double lo, double hi) { return RegionPredicate::box({lo}, {hi}); }

}  // namespace

TEST_SUITE("voronoi") {

TEST_CASE("region predicates") {
  const RegionPredicate b = RegionPredicate::ball({0.5, 0.5}, 0.25);
  CHECK(b.contains(std::vector<double>{0.5, 0.7}));
  CHECK_FALSE(b.contains(std::vector<double>{0.8, 0.5}));
  CHECK(*b.exact_volume() == doctest::Approx(std::numbers::pi / 16.0));
  CHECK_FALSE(RegionPredicate::ball({0.1, 0.5}, 0.25).exact_volume().has_value());
  const RegionPredicate box = RegionPredicate::box({-1.0, 0.25}, {0.5, 0.75});
  CHECK(*box.exact_volume() == doctest::Approx(0.25));
  CHECK(*RegionPredicate::full_cube(3).exact_volume() == 1.0);
  CHECK(std::string(kind_name(box.kind())) == "box");
  CHECK(code_of([] { RegionPredicate::box({0.0}, {0.0, 1.0}); }) == ErrorCode::BadDimensions);
}

TEST_CASE("nearest nucleus and the tie rule") {
  const std::vector<double> one = {0.3, 0.3};
  CHECK(nearest_nucleus(std::vector<double>{0.9, 0.1}, one, 2) == 0);
  const std::vector<double> two = {0.2, 0.5, 0.8, 0.5};
  CHECK(nearest_nucleus(std::vector<double>{0.5, 0.1}, two, 2) == 0);
  CHECK(nearest_nucleus(std::vector<double>{0.8, 0.5}, two, 2) == 1);
  const std::vector<double> dup = {0.4, 0.4, 0.4, 0.4};
  CHECK(nearest_nucleus(std::vector<double>{0.4, 0.4}, dup, 2) == 0);
  const std::vector<double> none;
  CHECK(code_of([&] { nearest_nucleus(std::vector<double>{0.1}, none, 1); }) == ErrorCode::EmptyNuclei);
}

TEST_CASE("grid index matches brute force") {
  Rng rng = Seed(1).rng();
  for (std::size_t d : {1, 2, 3}) {
    const std::vector<double> nuclei = uniform(300 * d, rng);
    const NucleusIndex index(nuclei, d);
    CHECK(index.size() == 300);
    for (int q = 0; q < 2000; ++q) {
      const std::vector<double> y = uniform(d, rng);
      CHECK(index.nearest(y) == nearest_nucleus(y, nuclei, d));
    }
  }
}

TEST_CASE("exact one-dimensional volumes") {
  const std::vector<double> half = {0.5};
  CHECK(voronoi_volume_exact_1d(half, interval(0.0, 0.3)) == 0.0);
  const std::vector<double> pair = {0.75, 0.25};
  CHECK(std::fabs(voronoi_volume_exact_1d(pair, interval(0.0, 0.5)) - 0.5) < 1e-12);
  CHECK(std::fabs(voronoi_volume_exact_1d(pair, interval(0.0, 1.0)) - 1.0) < 1e-12);
  const std::vector<double> three = {0.1, 0.4, 0.9};
  CHECK(std::fabs(voronoi_volume_exact_1d(three, interval(0.3, 0.5)) - 0.4) < 1e-12);
  CHECK(code_of([&] { voronoi_volume_exact_1d(half, RegionPredicate::full_cube(2)); }) ==
        ErrorCode::BadDimensions);
}

TEST_CASE("trivial regions give exactly one") {
  Rng rng = Seed(2).rng();
  const std::vector<double> nuclei = uniform(2 * 50, rng);
  CHECK(voronoi_volume_estimate(nuclei, RegionPredicate::full_cube(2), 1000, rng).value == 1.0);
  const std::vector<double> inner = {0.5, 0.5, 0.55, 0.45};
  const Estimate e = voronoi_volume_estimate(inner, RegionPredicate::ball({0.5, 0.5}, 0.25), 1000, rng);
  CHECK(e.value == 1.0);
  CHECK(e.standard_error == 0.0);
  const std::vector<double> none;
  CHECK(code_of([&] { voronoi_volume_estimate(none, RegionPredicate::full_cube(2), 10, rng); }) ==
        ErrorCode::EmptyNuclei);
}

TEST_CASE("Monte Carlo estimate agrees with the exact cells in one dimension") {
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) agree += voronoi_1d_z(seed) <= 3.0 ? 1 : 0;
  CHECK(agree == 100);
}

TEST_CASE("estimate is bounded, monotone in K and permutation invariant") {
  Rng rng = Seed(4).rng();
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> nuclei = uniform(2 * 40, rng);
    const std::vector<double> pts = uniform(2 * 4000, rng);
    const RegionPredicate small = RegionPredicate::ball({0.5, 0.5}, 0.2);
    const RegionPredicate large = RegionPredicate::ball({0.5, 0.5}, 0.35);
    const double phi_small = voronoi_volume_at(nuclei, small, pts).value;
    const double phi_large = voronoi_volume_at(nuclei, large, pts).value;
    CHECK(phi_small >= 0.0);
    CHECK(phi_large <= 1.0);
    CHECK(phi_small <= phi_large);
    std::vector<double> reversed;
    for (std::size_t i = 40; i-- > 0;) reversed.insert(reversed.end(), {nuclei[2 * i], nuclei[2 * i + 1]});
    CHECK(voronoi_volume_at(reversed, small, pts).value == phi_small);
  }
}

TEST_CASE("grid and brute force paths agree above the cut-over") {
  Rng rng = Seed(5).rng();
  const std::vector<double> nuclei = uniform(2 * 200, rng);
  const std::vector<double> pts = uniform(2 * 3000, rng);
  const RegionPredicate k = RegionPredicate::box({0.1, 0.2}, {0.6, 0.9});
  std::size_t hits = 0;
  for (std::size_t p = 0; p < 3000; ++p) {
    const std::span<const double> y(pts.data() + 2 * p, 2);
    const std::size_t i = nearest_nucleus(y, nuclei, 2);
    hits += k.contains(std::span<const double>(nuclei.data() + 2 * i, 2)) ? 1 : 0;
  }
  CHECK(voronoi_volume_at(nuclei, k, pts).value == doctest::Approx(hits / 3000.0).epsilon(1e-15));
}

TEST_CASE("nuclei follow the cell laws") {
  VoronoiConfig c;
  c.dimension = 2;
  c.n = 20000;
  c.cell_weights = {0.3, 0.7};
  c.c_m = 0.6;
  c.c_M = 1.4;
  Rng rng = Seed(6).rng();
  const std::vector<double> nuclei = sample_nuclei(c, two_state(), rng);
  REQUIRE(nuclei.size() == 2 * c.n);
  std::size_t low = 0;
  for (std::size_t i = 0; i < c.n; ++i) {
    CHECK(nuclei[2 * i] >= 0.0);
    CHECK(nuclei[2 * i + 1] <= 1.0);
    low += nuclei[2 * i] < 0.5 ? 1 : 0;
  }
  // Stationary law (2/3, 1/3) mixes the two cell weights.
  const double p = 2.0 / 3.0 * 0.3 + 1.0 / 3.0 * 0.7;
  CHECK(within(static_cast<double>(low) / c.n, p, 0.02 / 3.0));
  c.cell_weights = {0.5};
  CHECK(code_of([&] { sample_nuclei(c, two_state(), rng); }) == ErrorCode::StateMismatch);
}

TEST_CASE("phi functional and model") {
  VoronoiConfig c;
  c.dimension = 1;
  c.n = 16;
  const RegionPredicate k = interval(0.0, 0.5);
  const HmmSpec cells = cell_spec(c, hmmstein::testing::fair_coin());
  Rng rng = Seed(7).rng();
  const Trajectory t = reconstruct(sample_instructions(cells, c.n, rng));
  const double exact = phi_exact_functional_1d(k)(t);
  CHECK(exact == voronoi_volume_exact_1d(nuclei_from_observation(1, observed_view(t)), k));
  c.points = 50000;
  const double mc = phi_functional(c, k, Seed(8))(t);
  CHECK(within(mc, exact, binomial_se(exact, 50000.0)));
  const Model m = voronoi_model(c, hmmstein::testing::fair_coin(), k, Seed(9))(32);
  CHECK(m.functional.name() == "voronoi.phi");
  CHECK(code_of([&] { phi_functional(c, RegionPredicate::full_cube(2), Seed(1)); }) ==
        ErrorCode::BadDimensions);
}

TEST_CASE("full cube runs are flagged degenerate") {
  VoronoiConfig c;
  c.dimension = 2;
  c.points = 500;
  const std::vector<std::size_t> grid = {8, 16};
  const auto points = run_voronoi_clt(c, hmmstein::testing::fair_coin(), RegionPredicate::full_cube(2),
                                      grid, 20, Seed(10));
  for (const CltPoint& p : points) {
    CHECK(p.summary.degenerate());
    CHECK_FALSE(p.summary.d_kolmogorov.has_value());
  }
}

TEST_CASE("one-dimensional variance decreases with n") {
  VoronoiConfig c;
  c.dimension = 1;
  const std::vector<std::size_t> grid = {16, 64, 256, 1024};
  const auto points = run_voronoi_clt(c, hmmstein::testing::fair_coin(), interval(0.0, 0.5), grid, 400,
                                      Seed(11));
  std::vector<double> n, var;
  for (const CltPoint& p : points) {
    n.push_back(static_cast<double>(p.n));
    var.push_back(p.summary.variance);
  }
  CHECK(fit_log_slope(n, var).slope < 0.0);
}

}  // TEST_SUITE
