// Copyright 2026 The Intentsynth Authors
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

#include "text.hpp"

#include <cctype>

namespace intentsynth {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_separator(char c) {
  return c == ' ' || c == '\t' || c == '/' || c == '-' || c == '.';
}

}  // namespace

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string canonical_name(std::string_view raw) {
  std::string t = trim(raw);
  std::string out;
  out.reserve(t.size() + 4);
  bool prev_word_char = false;  // last emitted char was a lower/digit
  for (char c : t) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (is_separator(c) || c == '_') {
      if (!out.empty() && out.back() != '_') out.push_back('_');
      prev_word_char = false;
    } else if (std::isupper(uc)) {
      if (prev_word_char && !out.empty() && out.back() != '_') out.push_back('_');
      out.push_back(static_cast<char>(std::tolower(uc)));
      prev_word_char = false;
    } else {
      out.push_back(c);
      prev_word_char = std::islower(uc) != 0 || std::isdigit(uc) != 0;
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  size_t b = 0;
  while (b < out.size() && out[b] == '_') ++b;
  return out.substr(b);
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      std::string_view line = s.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      start = i + 1;
    }
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> tokenize_words(std::string_view s) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i == start) break;
    std::string_view word = s.substr(start, i - start);
    size_t b = 0;
    size_t e = word.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(word[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1]))) --e;
    if (e > b) tokens.push_back(to_lower(word.substr(b, e - b)));
  }
  return tokens;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string number_word(int n) {
  static const char* kWords[] = {
      "zero",     "one",     "two",       "three",    "four",
      "five",     "six",     "seven",     "eight",    "nine",
      "ten",      "eleven",  "twelve",    "thirteen", "fourteen",
      "fifteen",  "sixteen", "seventeen", "eighteen", "nineteen",
      "twenty"};
  if (n >= 0 && n <= 20) return kWords[n];
  return std::to_string(n);
}

}  // namespace intentsynth
