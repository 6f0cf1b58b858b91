// Copyright 2026 The gmrf-graphlearn Authors
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

#ifndef GMRF_CSV_HPP_
#define GMRF_CSV_HPP_

#include <string>
#include <vector>

namespace gmrf::csv {

// Splits one comma-separated line into whitespace-trimmed fields. Quoting is
// not supported. Returns an empty vector for blank lines and '#' comments.
std::vector<std::string> split_line(const std::string& line);

// Strict full-field parse; throws DataError mentioning `where`.
double parse_double(const std::string& field, const std::string& where);

// Shortest representation that round-trips to the same double.
std::string format_double(double x);

}  // namespace gmrf::csv

#endif  // GMRF_CSV_HPP_
