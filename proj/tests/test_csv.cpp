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
#include <limits>
#include <string>
#include <vector>

#include "hmmstein/csv.hpp"
#include "hmmstein/error.hpp"
#include "test_util.hpp"

using namespace hmmstein;
using hmmstein::testing::code_of;

TEST_SUITE("csv") {

TEST_CASE("fields are quoted only when needed") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(csv_line({"x", "1"}) == "x,1\r\n");
}

TEST_CASE("documents round trip") {
  const CsvRow header = {"name", "value"};
  const std::vector<CsvRow> rows = {{"a,b", "1"}, {"q\"uote", ""}, {"multi\r\nline", "3"}};
  const auto parsed = parse_csv(csv_document(header, rows));
  REQUIRE(parsed.size() == 4);
  CHECK(parsed[0] == header);
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(parsed[k + 1] == rows[k]);
  CHECK(parse_csv("a,b\nc,d\n") == std::vector<CsvRow>{{"a", "b"}, {"c", "d"}});
  CHECK(parse_csv("").empty());
}

TEST_CASE("malformed quoting is rejected") {
  CHECK(code_of([] { parse_csv("\"open,1\r\n"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_csv("a\"b,1\r\n"); }) == ErrorCode::ConfigParse);
}

TEST_CASE("doubles print exactly") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) CHECK(std::stod(format_double(v)) == v);
}

}  // TEST_SUITE
