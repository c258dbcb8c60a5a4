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

#ifndef ACTHOOK_CLI_H_
#define ACTHOOK_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace acthook::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kFailure = 2;

// args excludes the program name.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace acthook::cli

#endif  // ACTHOOK_CLI_H_
