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
#include <array>
#include <atomic>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hmmstein/error.hpp"
#include "hmmstein/hmm.hpp"
#include "hmmstein/parallel.hpp"
#include "hmmstein/random.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hmmstein;
using hmmstein::testing::path_probability;
using hmmstein::testing::code_of;
using hmmstein::testing::make_spec;
using hmmstein::testing::two_state;

namespace {

InstructionStack manual_stack(std::size_t n, std::size_t states, std::vector<State> entry_states) {
  InstructionStack st;
  st.n = n;
  st.num_states = states;
  for (State s : entry_states) st.entries.push_back({s, s, 0});
  return st;
}

}  // namespace

TEST_SUITE("hmm") {

TEST_CASE("validate_spec reports the first violated rule") {
  CHECK_NOTHROW(validate_spec(two_state()));
  CHECK(code_of([] { validate_spec(make_spec({0.5, 0.6}, {{1, 0}, {0, 1}}, {{1}, {1}})); }) ==
        ErrorCode::NonStochasticRow);
  CHECK(code_of([] { validate_spec(make_spec({1.5, -0.5}, {{1, 0}, {0, 1}}, {{1}, {1}})); }) ==
        ErrorCode::NegativeEntry);
  CHECK(code_of([] { validate_spec(make_spec({1.0}, {{1, 0}}, {{1}})); }) == ErrorCode::BadDimensions);
  CHECK(code_of([] { validate_spec(make_spec({0.5, 0.5}, {{0.9, 0.1}, {0.3, 0.6}}, {{1}, {1}})); }) ==
        ErrorCode::NonStochasticRow);
}

TEST_CASE("model JSON round trip") {
  const HmmSpec s = two_state();
  CHECK(parse_spec_json(spec_to_json(s)) == s);
  CHECK(code_of([] { parse_spec_json("{not json"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_spec_json(R"({"states": 1})"); }) == ErrorCode::ConfigParse);
}

TEST_CASE("mixing constants") {
  const auto m = mixing_constants(two_state());
  CHECK(m.K == 1);
  CHECK(m.epsilon == doctest::Approx(0.1).epsilon(1e-15));
  // P^2 = [[0.5, 0.5], [0.25, 0.75]].
  const auto lazy = mixing_constants(make_spec({0.5, 0.5}, {{0, 1}, {0.5, 0.5}}, {{1}, {1}}));
  CHECK(lazy.K == 2);
  CHECK(lazy.epsilon == doctest::Approx(0.25));
  CHECK(code_of([] { mixing_constants(make_spec({0.5, 0.5}, {{0, 1}, {1, 0}}, {{1}, {1}})); }) ==
        ErrorCode::NotMixing);
  const auto iid = mixing_constants(testing::fair_coin());
  CHECK(iid.K == 1);
  CHECK(iid.epsilon == 1.0);
}

TEST_CASE("stationary distribution of the 2-state chain is (2/3, 1/3)") {
  const auto pi = stationary_distribution(two_state().transition);
  CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const auto periodic = stationary_distribution(Matrix::from_rows({{0, 1}, {1, 0}}));
  CHECK(periodic[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("stack layout") {
  CHECK(stack_size(1, 1) == 1);
  CHECK(stack_size(2, 3) == 5);
  CHECK(stack_size(3, 10) == 28);
  CHECK(entry_index(1, 0, 2) == 1);
  CHECK(entry_index(1, 1, 2) == 2);
  CHECK(entry_index(2, 0, 2) == 3);
  // Every index past 0 is hit by exactly one (step, from) pair.
  std::vector<int> hits(stack_size(3, 5), 0);
  for (std::size_t step = 1; step < 5; ++step)
    for (State s = 0; s < 3; ++s) ++hits[entry_index(step, s, 3)];
  CHECK(hits[0] == 0);
  CHECK(std::all_of(hits.begin() + 1, hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("reconstruct reads one entry per step along the hidden path") {
  Rng rng = Seed(5).rng();
  const HmmSpec s = two_state();
  for (int rep = 0; rep < 50; ++rep) {
    const InstructionStack st = sample_instructions(s, 12, rng);
    CHECK_NOTHROW(validate_stack(st, s));
    const Trajectory t = reconstruct(st);
    REQUIRE(t.size() == 12);
    CHECK(t.source[0] == 0);
    for (std::size_t k = 1; k < 12; ++k) {
      CHECK(t.source[k] == entry_index(k, t.hidden[k - 1], 2));
      CHECK(t.hidden[k] == st.entries[t.source[k]].state);
      CHECK(t.observed[k] == st.entries[t.source[k]].symbol);
    }
  }
}

TEST_CASE("n = 1 uses only the initial entry") {
  Rng rng = Seed(1).rng();
  const InstructionStack st = sample_instructions(two_state(), 1, rng);
  CHECK(st.size() == 1);
  CHECK(reconstruct(st).size() == 1);
  CHECK(code_of([&] { sample_instructions(two_state(), 0, rng); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("path law matches the product formula for |S| = |A| = 2, n = 3") {
  const HmmSpec s = two_state();
  const std::size_t reps = 200000;
  std::map<std::pair<std::vector<State>, std::vector<Symbol>>, std::size_t> counts;
  Rng rng = Seed(77).rng();
  const InstructionSampler sampler(s);
  for (std::size_t r = 0; r < reps; ++r) {
    const Trajectory t = reconstruct(sampler.sample(3, rng));
    ++counts[{t.hidden, t.observed}];
  }
  int checked = 0;
  for (unsigned code = 0; code < 64; ++code) {
    std::vector<State> z(3);
    std::vector<Symbol> x(3);
    for (unsigned k = 0; k < 3; ++k) {
      z[k] = (code >> k) & 1u;
      x[k] = (code >> (k + 3)) & 1u;
    }
    const double p = path_probability(s, z, x);
    const double freq = static_cast<double>(counts[{z, x}]) / reps;
    CHECK(testing::within(freq, p, testing::binomial_se(p, reps), 4.0));
    ++checked;
  }
  CHECK(checked == 64);
}

TEST_CASE("sample_path has the law of reconstruct(sample)") {
  const HmmSpec s = two_state();
  const std::size_t reps = 100000;
  std::array<std::size_t, 64> counts{};
  Rng rng = Seed(78).rng();
  const InstructionSampler sampler(s);
  Trajectory t;
  for (std::size_t r = 0; r < reps; ++r) {
    sampler.sample_path(3, rng, t);
    unsigned code = 0;
    for (unsigned k = 0; k < 3; ++k) code |= (t.hidden[k] << k) | (t.observed[k] << (k + 3));
    ++counts[code];
    CHECK(t.source[0] == 0);
  }
  for (unsigned code = 0; code < 64; ++code) {
    std::vector<State> z(3);
    std::vector<Symbol> x(3);
    for (unsigned k = 0; k < 3; ++k) {
      z[k] = (code >> k) & 1u;
      x[k] = (code >> (k + 3)) & 1u;
    }
    const double p = path_probability(s, z, x);
    CHECK(testing::within(static_cast<double>(counts[code]) / reps, p,
                          testing::binomial_se(p, reps), 4.0));
  }
}

TEST_CASE("perturbation sets") {
  CHECK(code_of([] { PerturbationSet({2, 1}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { PerturbationSet({1, 1}); }) == ErrorCode::InvalidArgument);
  const auto A = PerturbationSet::from_unsorted({3, 1, 3});
  CHECK(A.size() == 2);
  CHECK(A.contains(1));
  CHECK_FALSE(A.contains(2));
  CHECK(A.with(2).size() == 3);
  CHECK(PerturbationSet::all(4).size() == 4);
}

TEST_CASE("perturb takes exactly the entries in A from the fresh stack") {
  Rng rng = Seed(9).rng();
  const HmmSpec s = two_state();
  const InstructionStack a = sample_instructions(s, 6, rng);
  const InstructionStack b = sample_instructions(s, 6, rng);
  const PerturbationSet A({0, 3, 7});
  const InstructionStack c = perturb(a, A, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Instruction& want = A.contains(i) ? b.entries[i] : a.entries[i];
    CHECK(c.entries[i].state == want.state);
    CHECK(c.entries[i].symbol == want.symbol);
    CHECK(c.entries[i].mark == want.mark);
  }
  CHECK(perturb(a, PerturbationSet{std::vector<std::size_t>{}}, b).entries.size() == a.size());
  const InstructionStack shorter = sample_instructions(s, 5, rng);
  CHECK(code_of([&] { perturb(a, A, shorter); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { perturb(a, PerturbationSet({11}), b); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("perturbing unread entries leaves the trajectory unchanged") {
  Rng rng = Seed(10).rng();
  const HmmSpec s = two_state();
  for (int rep = 0; rep < 30; ++rep) {
    const InstructionStack a = sample_instructions(s, 8, rng);
    const InstructionStack b = sample_instructions(s, 8, rng);
    const Trajectory t = reconstruct(a);
    std::vector<std::size_t> unread;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::find(t.source.begin(), t.source.end(), i) == t.source.end()) unread.push_back(i);
    const Trajectory u = reconstruct(perturb(a, PerturbationSet(unread), b));
    CHECK(u.hidden == t.hidden);
    CHECK(u.observed == t.observed);
    CHECK(u.marks == t.marks);
  }
}

TEST_CASE("coupling length on hand-built stacks") {
  // n = 3, |S| = 2: entries are 0, (1, from 0), (1, from 1), (2, from 0), (2, from 1).
  const InstructionStack sticky = manual_stack(3, 2, {0, 0, 1, 0, 1});
  const InstructionStack flip_start = manual_stack(3, 2, {1, 0, 1, 0, 1});
  CHECK(coupling_length(sticky, 0, flip_start).is_infinite());
  CHECK(coupling_length(sticky, 0, sticky).steps() == 0);
  // Entry 2 (step 1 from state 1) is never read on the all-zero path.
  CHECK(coupling_length(sticky, 2, flip_start).steps() == 0);
  // From state 1 the chain falls back to 0 at step 1.
  const InstructionStack falls = manual_stack(3, 2, {0, 0, 0, 0, 1});
  CHECK(coupling_length(falls, 0, flip_start).steps() == 1);
  CHECK(coupling_length(falls, 0, flip_start).at_least(1));
  CHECK_FALSE(coupling_length(falls, 0, flip_start).at_least(2));
  CHECK(code_of([&] { coupling_length(falls, 5, flip_start); }) == ErrorCode::IndexOutOfRange);
}

}  // TEST_SUITE

TEST_SUITE("random") {

TEST_CASE("seeds derive deterministic, distinct streams") {
  const Seed s(42);
  CHECK(s.derive(1).value() == Seed(42).derive(1).value());
  CHECK(s.derive(1).value() != s.derive(2).value());
  CHECK(s.derive({1, 2}).value() != s.derive({2, 1}).value());
  Rng a = s.rng(), b = s.rng();
  for (int k = 0; k < 10; ++k) CHECK(a.next() == b.next());
}

TEST_CASE("uniform and below stay in range") {
  Rng rng = Seed(3).rng();
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.below(7) < 7);
  }
}

TEST_CASE("alias table frequencies and zero weights") {
  const std::vector<double> w = {0.5, 0.0, 0.2, 0.3};
  const AliasTable table(w);
  Rng rng = Seed(4).rng();
  std::array<std::size_t, 4> counts{};
  const std::size_t reps = 100000;
  for (std::size_t r = 0; r < reps; ++r) ++counts[table.sample(rng)];
  CHECK(counts[1] == 0);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(testing::within(static_cast<double>(counts[k]) / reps, w[k],
                          testing::binomial_se(w[k], reps), 4.0));
  const std::vector<double> one = {1.0};
  Rng r1 = Seed(5).rng(), r2 = Seed(5).rng();
  CHECK(AliasTable(one).sample(r1) == 0);
  CHECK(r1.next() == r2.next());  // no randomness consumed
}

TEST_CASE("parallel_for writes per index and rethrows the smallest failure") {
  std::vector<std::size_t> out(1000);
  parallel_for(out.size(), 4, [&](std::size_t k) { out[k] = k * k; });
  for (std::size_t k = 0; k < out.size(); ++k) CHECK(out[k] == k * k);
  std::atomic<int> ran{0};
  try {
    parallel_for(100, 3, [&](std::size_t k) {
      ++ran;
      if (k % 10 == 7) throw std::runtime_error(std::to_string(k));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
  CHECK(ran == 100);
}

}  // TEST_SUITE
