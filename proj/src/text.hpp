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

#ifndef INTENTSYNTH_TEXT_HPP
#define INTENTSYNTH_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace intentsynth {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Canonical intent/domain names: lower-cased, camel case split on word
// boundaries, separators collapsed to single underscores.
// "FindRestaurants" -> "find_restaurants", "kitchen/dining" -> "kitchen_dining".
std::string canonical_name(std::string_view raw);

std::vector<std::string> split_lines(std::string_view s);

// Word tokenizer used by the diversity metrics: lower-cased whitespace split
// with punctuation stripped at token edges (internal apostrophes survive).
std::vector<std::string> tokenize_words(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// "one", "two", ... up to twenty; digits beyond that.
std::string number_word(int n);

}  // namespace intentsynth

#endif  // INTENTSYNTH_TEXT_HPP
