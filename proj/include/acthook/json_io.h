// Copyright 2026 The acthook Authors.
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

#ifndef ACTHOOK_JSON_IO_H_
#define ACTHOOK_JSON_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "acthook/trajectory.h"

namespace acthook {

// Rounds to `digits` significant decimal digits so that last-ulp libm
// differences do not leak into serialized reports.
double round_sig(double v, int digits = 12);

// Report number: rounded finite value, or "+inf" / "-inf" / "nan" strings.
Json report_number(double v);

// Pretty JSON followed by a newline.
std::string dump_report(const Json& j);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace acthook

#endif  // ACTHOOK_JSON_IO_H_
