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

#include <cmath>
#include <vector>

#include "hmmstein/error.hpp"
#include "hmmstein/occupancy.hpp"
#include "hmmstein/random.hpp"
#include "test_util.hpp"

using namespace hmmstein;
using namespace hmmstein::occupancy;
using hmmstein::testing::code_of;
using hmmstein::testing::fair_coin;
using hmmstein::testing::two_state;
using hmmstein::testing::within;

namespace {

// Empty-urn moments for n uniform balls in L urns.
double iid_mean(double n, double L) { return L * std::pow(1.0 - 1.0 / L, n); }
double iid_variance(double n, double L) {
  return L * (L - 1.0) * std::pow(1.0 - 2.0 / L, n) + iid_mean(n, L) -
         L * L * std::pow(1.0 - 1.0 / L, 2.0 * n);
}

std::vector<double> replicate_w(const Model& m, std::size_t n, std::size_t count, Seed seed) {
  std::vector<double> w(count);
  Rng rng = seed.rng();
  for (double& v : w) v = m.functional(reconstruct(sample_instructions(m.spec, n, rng)));
  return w;
}

}  // namespace

TEST_SUITE("occupancy") {

TEST_CASE("count examples") {
  const std::vector<Symbol> x = {0, 2, 2, 0};
  CHECK(occupancy_count(x, 4) == 2);
  CHECK(occupancy_count(x, 3) == 1);
  const std::vector<Symbol> all = {3, 1, 0, 2};
  CHECK(occupancy_count(all, 4) == 0);
  CHECK(occupancy_count(std::vector<Symbol>{}, 5) == 5);
  CHECK(code_of([&] { occupancy_count(x, 2); }) == ErrorCode::SymbolOutOfRange);
}

TEST_CASE("alphabet size and family names") {
  OccupancyConfig c;
  CHECK(c.letters(100) == 100);
  c.alpha = 0.5;
  CHECK(c.letters(101) == 50);
  CHECK(parse_family("blocks") == Family::Blocks);
  CHECK(std::string(family_name(Family::Uniform)) == "uniform");
  CHECK(code_of([] { parse_family("zipf"); }) == ErrorCode::ConfigParse);
  c.alpha = 0.001;
  CHECK(code_of([&] { occupancy_spec(c, fair_coin(), 10); }) == ErrorCode::InvalidArgument);
  c.alpha = -1.0;
  CHECK(code_of([&] { validate_config(c); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("letter blocks cover the alphabet") {
  OccupancyConfig c;
  c.family = Family::Blocks;
  const auto b = letter_blocks(c, 2, 100);
  CHECK(b[0].start == 0);
  CHECK(b[0].length == 75);
  CHECK(b[1].start == 25);
  CHECK(b[1].start + b[1].length == 100);
  const auto three = letter_blocks(c, 3, 10);
  CHECK(three[1].start == 1);
  c.coverage = 0.3;
  CHECK(code_of([&] { letter_blocks(c, 2, 100); }) == ErrorCode::InvalidArgument);
  CHECK(letter_blocks(c, 4, 100).back().start + letter_blocks(c, 4, 100).back().length == 100);
  const HmmSpec s = occupancy_spec(OccupancyConfig{1.0, Family::Blocks, 0.75}, two_state(), 8);
  CHECK(s.num_symbols == 8);
  CHECK(s.emission(0, 5) == doctest::Approx(1.0 / 6.0));
  CHECK(s.emission(0, 6) == 0.0);
  CHECK(s.emission(1, 1) == 0.0);
  for (std::size_t n : {1000, 100000, 1000003})
    CHECK_NOTHROW(validate_spec(occupancy_spec(OccupancyConfig{}, fair_coin(), n)));
}

TEST_CASE("independent uniform letters match the empty-urn law") {
  const std::size_t n = 50;
  const Model m = occupancy_model(OccupancyConfig{}, fair_coin())(n);
  const std::vector<double> w = replicate_w(m, n, 20000, Seed(1));
  const Estimate mean = mean_estimate(w);
  const Estimate var = variance_estimate(w);
  CHECK(within(mean.value, iid_mean(50, 50), mean.standard_error));
  CHECK(within(var.value, iid_variance(50, 50), var.standard_error));
}

TEST_CASE("bounds and the one-letter case") {
  OccupancyConfig c;
  c.alpha = 2.0;
  const std::size_t n = 10;
  const Model m = occupancy_model(c, two_state())(n);
  for (double v : replicate_w(m, n, 500, Seed(2))) {
    CHECK(v >= 10.0);
    CHECK(v <= 19.0);
  }
  c.alpha = 0.1;
  const Model one = occupancy_model(c, fair_coin())(10);
  for (double v : replicate_w(one, 10, 50, Seed(3))) CHECK(v == 0.0);
  const std::vector<std::size_t> grid = {10, 12};
  for (const CltPoint& p : run_occupancy_clt(OccupancyConfig{0.1}, fair_coin(), grid, 50, Seed(4)))
    CHECK(p.summary.degenerate());
}

TEST_CASE("one flip moves W by at most one") {
  const std::size_t L = 4;
  const Functional f = occupancy_functional(L);
  CHECK(f.lipschitz_constant().value() == 1.0);
  std::vector<Symbol> x(4);
  std::vector<std::uint64_t> marks(4, 0);
  for (std::size_t code = 0; code < 256; ++code) {
    for (std::size_t k = 0; k < 4; ++k) x[k] = static_cast<Symbol>((code >> (2 * k)) & 3);
    const double base = f(ObservedView{x, marks});
    for (std::size_t k = 0; k < 4; ++k) {
      const Symbol keep = x[k];
      for (Symbol y = 0; y < L; ++y) {
        x[k] = y;
        CHECK(std::fabs(f(ObservedView{x, marks}) - base) <= 1.0);
      }
      x[k] = keep;
    }
  }
}

TEST_CASE("clt runs are reproducible") {
  const std::vector<std::size_t> grid = {64, 128, 256};
  const OccupancyConfig c{1.0, Family::Blocks, 0.75};
  const auto a = run_occupancy_clt(c, two_state(), grid, 200, Seed(5));
  const auto b = run_occupancy_clt(c, two_state(), grid, 200, Seed(5), 3);
  REQUIRE(a.size() == 3);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].values == b[k].values);
  CHECK(a[2].summary.variance > a[0].summary.variance);
}

}  // TEST_SUITE
