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

#ifndef ACTHOOK_PATTERNS_H_
#define ACTHOOK_PATTERNS_H_

#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace acthook {

// Case-insensitive (ASCII) substring pattern. `*` matches up to
// kMaxWildcardSpan characters on the same line; `\*` is a literal star.
class Pattern {
 public:
  static constexpr std::size_t kMaxWildcardSpan = 80;

  explicit Pattern(std::string source);

  bool matches(std::string_view text) const;
  const std::string& source() const { return source_; }

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.source_ == b.source_;
  }

 private:
  bool match_from(std::string_view text, std::size_t pos, std::size_t piece) const;

  std::string source_;
  std::vector<std::string> pieces_;  // lower-cased literals between wildcards
};

bool matches_all(const std::vector<Pattern>& patterns, std::string_view text);
bool matches_any(const std::vector<Pattern>& patterns, std::string_view text);

// Recognizes actions that create files and extracts the created paths.
class CreationCatalog {
 public:
  // Each regex must have exactly one capture group holding the path.
  explicit CreationCatalog(std::vector<std::string> regexes);

  static const CreationCatalog& builtin();

  std::vector<std::string> created_paths(std::string_view action) const;
  bool creates_file(std::string_view action) const {
    return !created_paths(action).empty();
  }
  const std::vector<std::string>& sources() const { return sources_; }

 private:
  std::vector<std::string> sources_;
  std::vector<std::regex> regexes_;
};

std::optional<std::string> first_url(std::string_view text);

std::string to_lower_ascii(std::string_view s);

}  // namespace acthook

#endif  // ACTHOOK_PATTERNS_H_
