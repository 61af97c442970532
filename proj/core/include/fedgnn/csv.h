// Copyright 2026 The fedgnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDGNN_CSV_H_
#define FEDGNN_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace fedgnn {

// Shortest round-trip decimal form of `x`; byte-stable for a given value.
std::string FormatDouble(double x);

// Splits one line on commas. No quoting: every field in this project is
// numeric or a bare identifier.
std::vector<std::string_view> SplitCsvLine(std::string_view line);

std::string JoinCsv(const std::vector<std::string>& fields);

// Strict numeric parsing; throw ValidationError with `what` in the message.
double ParseDouble(std::string_view field, const std::string& what);
long long ParseInt(std::string_view field, const std::string& what);

}  // namespace fedgnn

#endif  // FEDGNN_CSV_H_
