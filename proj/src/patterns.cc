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

#include "acthook/patterns.h"

#include <algorithm>
#include <cctype>

#include "acthook/errors.h"

namespace acthook {

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

Pattern::Pattern(std::string source) : source_(std::move(source)) {
  std::string piece;
  for (std::size_t i = 0; i < source_.size(); ++i) {
    char c = source_[i];
    if (c == '\\' && i + 1 < source_.size() && source_[i + 1] == '*') {
      piece.push_back('*');
      ++i;
    } else if (c == '*') {
      pieces_.push_back(to_lower_ascii(piece));
      piece.clear();
    } else {
      piece.push_back(c);
    }
  }
  pieces_.push_back(to_lower_ascii(piece));
  if (std::all_of(pieces_.begin(), pieces_.end(),
                  [](const std::string& p) { return p.empty(); })) {
    throw ArgumentError("pattern \"" + source_ + "\" has no literal text");
  }
}

bool Pattern::match_from(std::string_view text, std::size_t pos,
                         std::size_t piece) const {
  if (piece == pieces_.size()) return true;
  const std::string& lit = pieces_[piece];
  // Pieces after the first are preceded by a wildcard.
  const std::size_t limit = std::min(text.size(), pos + kMaxWildcardSpan);
  for (std::size_t start = pos; start <= limit; ++start) {
    if (start > pos && text[start - 1] == '\n') break;
    if (text.compare(start, lit.size(), lit) == 0 &&
        match_from(text, start + lit.size(), piece + 1)) {
      return true;
    }
  }
  return false;
}

bool Pattern::matches(std::string_view text) const {
  const std::string lower = to_lower_ascii(text);
  const std::string& head = pieces_.front();
  std::size_t pos = 0;
  while (pos <= lower.size()) {
    std::size_t hit = head.empty() ? pos : lower.find(head, pos);
    if (hit == std::string::npos) return false;
    if (match_from(lower, hit + head.size(), 1)) return true;
    pos = hit + 1;
  }
  return false;
}

bool matches_all(const std::vector<Pattern>& patterns, std::string_view text) {
  return std::all_of(patterns.begin(), patterns.end(),
                     [&](const Pattern& p) { return p.matches(text); });
}

bool matches_any(const std::vector<Pattern>& patterns, std::string_view text) {
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const Pattern& p) { return p.matches(text); });
}

namespace {

// Heredoc bodies are file contents, not commands; comparisons such as
// `if x > 5:` inside them must not read as redirections.
std::string strip_heredoc_bodies(std::string_view text) {
  std::string out;
  std::string delimiter;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!delimiter.empty()) {
      std::string_view trimmed = line;
      while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
        trimmed.remove_suffix(1);
      }
      while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
        trimmed.remove_prefix(1);
      }
      if (trimmed == delimiter) delimiter.clear();
      // Keep a tail that closes an XML-ish wrapper on the same line.
      if (auto close = line.find("</parameter>"); close != std::string_view::npos) {
        delimiter.clear();
        out.append(line.substr(close)).push_back('\n');
      }
    } else {
      out.append(line).push_back('\n');
      if (auto h = line.find("<<"); h != std::string_view::npos) {
        std::size_t i = h + 2;
        if (i < line.size() && line[i] == '-') ++i;
        while (i < line.size() && line[i] == ' ') ++i;
        std::string d;
        for (; i < line.size(); ++i) {
          char c = line[i];
          if (c == '\'' || c == '"') continue;
          if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            d.push_back(c);
          } else {
            break;
          }
        }
        delimiter = d;
      }
    }
    pos = eol + 1;
  }
  return out;
}

bool plausible_path(const std::string& p) {
  if (p.empty() || p == "/dev/null" || p.rfind("/dev/", 0) == 0) return false;
  if (p.front() == '&' || p.front() == '$') return false;
  if (p.find('/') == std::string::npos && p.find('.') == std::string::npos) return false;
  const char first = p.front();
  return std::isalnum(static_cast<unsigned char>(first)) || first == '/' ||
         first == '.' || first == '~' || first == '_';
}

}  // namespace

CreationCatalog::CreationCatalog(std::vector<std::string> regexes)
    : sources_(std::move(regexes)) {
  for (const auto& src : sources_) {
    try {
      std::regex re(src, std::regex::ECMAScript | std::regex::icase);
      if (re.mark_count() != 1) {
        throw ArgumentError("creation pattern \"" + src + "\" needs one capture group");
      }
      regexes_.push_back(std::move(re));
    } catch (const std::regex_error& e) {
      throw ArgumentError("invalid creation pattern \"" + src + "\": " + e.what());
    }
  }
}

const CreationCatalog& CreationCatalog::builtin() {
  static const CreationCatalog catalog({
      R"(\btouch\s+([^\s;&|<>'"]+))",
      R"((?:^|[^<>&0-9=\-])>>?\s*([^\s;&|<>'"]+))",
      R"(\btee\s+(?:-a\s+)?([^\s;&|<>'"]+))",
      R"(<parameter=command>\s*create\s*</parameter>\s*<parameter=path>\s*([^<\s]+))",
      R"(\bstr_replace_editor\s+create\s+([^\s;&|<>'"]+))",
      R"(\bopen\(\s*['"]([^'"]+)['"]\s*,\s*['"][wax])",
  });
  return catalog;
}

std::vector<std::string> CreationCatalog::created_paths(std::string_view action) const {
  const std::string text = strip_heredoc_bodies(action);
  std::vector<std::string> paths;
  for (const auto& re : regexes_) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
      std::string p = (*it)[1].str();
      if (plausible_path(p) && std::find(paths.begin(), paths.end(), p) == paths.end()) {
        paths.push_back(std::move(p));
      }
    }
  }
  return paths;
}

std::optional<std::string> first_url(std::string_view text) {
  static const std::regex url(R"(https?://[^\s"'<>)\]\}]+)", std::regex::ECMAScript);
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(text.begin(), text.end(), m, url)) {
    std::string u = m[0].str();
    while (!u.empty() && (u.back() == '.' || u.back() == ',')) u.pop_back();
    return u;
  }
  return std::nullopt;
}

}  // namespace acthook
