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

#ifndef HMMSTEIN_CSV_HPP_
#define HMMSTEIN_CSV_HPP_

// RFC 4180 tables: CRLF line ends, fields quoted when they hold a comma,
// quote, CR or LF, quotes doubled inside quoted fields.

#include <cstddef>
#include <string>
#include <vector>

namespace hmmstein {

using CsvRow = std::vector<std::string>;

std::string csv_field(const std::string& value);
std::string csv_line(const CsvRow& row);
std::string csv_document(const CsvRow& header, const std::vector<CsvRow>& rows);

// Parses a whole document; a missing final line end is accepted. Throws
// ConfigParse on an unterminated quote or a stray quote in a bare field.
std::vector<CsvRow> parse_csv(const std::string& text);

// Round-trip representation of a double ("%.17g"); "inf" for infinity.
std::string format_double(double value);

}  // namespace hmmstein

#endif  // HMMSTEIN_CSV_HPP_
