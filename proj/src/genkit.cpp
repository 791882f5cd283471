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

#include "genkit.hpp"

#include <cctype>

#include "rand.hpp"
#include "text.hpp"

namespace intentsynth {

PromptTemplate PromptTemplate::default_generation() {
  return PromptTemplate{
      "default",
      "Provide {count} different things a user might say to a virtual "
      "assistant when their intent is `{intent}' in the `{domain}' context. "
      "One per line."};
}

namespace {

void validate_placeholders(const PromptTemplate& tmpl) {
  const std::string& body = tmpl.body;
  size_t pos = 0;
  while ((pos = body.find('{', pos)) != std::string::npos) {
    size_t end = body.find('}', pos);
    if (end == std::string::npos) {
      fail(ErrorKind::Template,
           "unterminated placeholder in template '" + tmpl.template_id + "'");
    }
    std::string name = body.substr(pos + 1, end - pos - 1);
    if (name != "intent" && name != "domain" && name != "count") {
      fail(ErrorKind::Template, "unknown placeholder {" + name +
                                    "} in template '" + tmpl.template_id + "'");
    }
    pos = end + 1;
  }
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

bool is_quote_pair(char a, char b) {
  return (a == '"' && b == '"') || (a == '\'' && b == '\'') ||
         (a == '`' && b == '\'');
}

std::string cleanup_pass(const std::string& input, const CleanupRules& rules) {
  std::string s = trim(input);

  if (rules.strip_quotes && s.size() >= 2 && is_quote_pair(s.front(), s.back())) {
    s = trim(s.substr(1, s.size() - 2));
  }

  if (rules.strip_list_markers && !s.empty()) {
    size_t i = 0;
    bool matched = false;
    if (s[i] == '-' || s[i] == '*' || s[i] == '+') {
      ++i;
      matched = true;
    } else {
      size_t j = i;
      if (j < s.size() && (s[j] == '(' || s[j] == '[')) ++j;
      size_t digits_start = j;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j > digits_start && j < s.size() &&
          (s[j] == '.' || s[j] == ')' || s[j] == ']' || s[j] == ':')) {
        i = j + 1;
        matched = true;
      }
    }
    if (matched && i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
      s = trim(s.substr(i));
    } else if (matched && i == s.size()) {
      s.clear();
    }
  }

  if (rules.strip_user_prefix) {
    std::string lowered = to_lower(s);
    if (lowered.rfind("user:", 0) == 0) {
      s = trim(s.substr(5));
    }
  }

  if (rules.drop_trailing_parenthetical && !s.empty() && s.back() == ')') {
    size_t open = s.rfind('(');
    if (open != std::string::npos && open > 0) {
      std::string before = trim(s.substr(0, open));
      if (!before.empty() && (before.back() == '.' || before.back() == '?' ||
                              before.back() == '!')) {
        s = before;
      }
    }
  }

  if (rules.collapse_whitespace) {
    std::string collapsed;
    collapsed.reserve(s.size());
    bool in_space = false;
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        in_space = true;
        continue;
      }
      if (in_space && !collapsed.empty()) collapsed.push_back(' ');
      in_space = false;
      collapsed.push_back(c);
    }
    s = collapsed;
  }

  return s;
}

}  // namespace

std::string build_generation_prompt(const PromptTemplate& tmpl,
                                    const IntentKey& key, int count) {
  if (count < 1) fail(ErrorKind::Argument, "count must be >= 1");
  validate_placeholders(tmpl);
  std::string out = tmpl.body;
  out = replace_all(std::move(out), "{intent}", key.intent);
  out = replace_all(std::move(out), "{domain}", key.domain);
  out = replace_all(std::move(out), "{count}", std::to_string(count));
  return out;
}

std::string cleanup_text(std::string_view raw, const CleanupRules& rules) {
  // Rules run to a fixpoint so stripping one layer (say quotes) exposes the
  // next (say a list marker) within a single call; this also makes the whole
  // cleanup idempotent.
  std::string current(trim(raw));
  for (int i = 0; i < 16; ++i) {
    std::string next = cleanup_pass(current, rules);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

namespace {

std::vector<GenerationRecord> run_generation(GeneratorBackend& backend,
                                             const PromptTemplate& tmpl,
                                             const IntentKey& key, int count,
                                             uint64_t seed,
                                             const GenerationOptions& options,
                                             bool want_probabilities) {
  if (count < 1) fail(ErrorKind::Argument, "count must be >= 1");
  if (want_probabilities && !backend.returns_token_probabilities()) {
    fail(ErrorKind::Capability, "backend '" + backend.id() +
                                    "' does not report token probabilities");
  }

  std::vector<GenerationRecord> records;
  records.reserve(count);
  int consecutive_failures = 0;
  uint64_t attempt = 0;

  while (static_cast<int>(records.size()) < count) {
    const int remaining = count - static_cast<int>(records.size());
    GenerationRequest request;
    request.prompt = build_generation_prompt(tmpl, key, remaining);
    request.max_new_tokens = options.max_new_tokens;
    request.temperature = options.temperature;
    request.seed = seed_stream(seed, "gen_call", attempt);
    request.want_token_probabilities = want_probabilities;
    ++attempt;

    GenerationResponse response;
    bool call_failed = false;
    std::string failure_reason;
    try {
      response = backend.generate(request);
    } catch (const Error& e) {
      call_failed = true;
      failure_reason = e.what();
    }

    size_t accepted = 0;
    if (!call_failed) {
      const bool has_probs = !response.token_probabilities.empty();
      if (want_probabilities && !has_probs) {
        fail(ErrorKind::Backend, "backend '" + backend.id() +
                                     "' omitted token probabilities");
      }
      if (has_probs && response.token_probabilities.size() != response.texts.size()) {
        fail(ErrorKind::Backend,
             "backend '" + backend.id() +
                 "' returned misaligned token probabilities");
      }
      for (size_t i = 0;
           i < response.texts.size() && static_cast<int>(records.size()) < count;
           ++i) {
        // Backends may pack several utterances into one text.
        std::vector<std::string> parts = split_lines(response.texts[i]);
        if (parts.empty()) parts.push_back(response.texts[i]);
        for (const std::string& part : parts) {
          if (static_cast<int>(records.size()) >= count) break;
          std::string text = cleanup_text(part, options.cleanup);
          if (text.empty()) continue;  // regenerate later
          GenerationRecord record;
          record.text = std::move(text);
          record.key = key;
          if (has_probs) {
            const std::vector<double>& probs = response.token_probabilities[i];
            if (probs.empty()) {
              fail(ErrorKind::Backend, "backend '" + backend.id() +
                                           "' returned an empty probability list");
            }
            for (double p : probs) {
              if (!(p > 0.0) || p > 1.0) {
                fail(ErrorKind::Backend,
                     "backend '" + backend.id() +
                         "' returned a token probability outside (0, 1]");
              }
            }
            record.token_probabilities = probs;
          }
          record.prompt_id = tmpl.template_id;
          record.backend_id = backend.id();
          records.push_back(std::move(record));
          ++accepted;
        }
      }
    }

    if (accepted == 0) {
      ++consecutive_failures;
      if (consecutive_failures > options.max_retries) {
        std::string msg = "generation for intent '" + key.intent + "' stalled after " +
                          std::to_string(consecutive_failures) + " fruitless calls";
        if (!failure_reason.empty()) msg += ": " + failure_reason;
        throw GenerationError(msg, std::move(records));
      }
    } else {
      consecutive_failures = 0;
    }
  }
  return records;
}

}  // namespace

std::vector<GenerationRecord> generate_for_intent(GeneratorBackend& backend,
                                                  const PromptTemplate& tmpl,
                                                  const IntentKey& key, int count,
                                                  uint64_t seed,
                                                  const GenerationOptions& options) {
  return run_generation(backend, tmpl, key, count, seed, options,
                        /*want_probabilities=*/false);
}

std::vector<GenerationRecord> oversample_for_selection(
    GeneratorBackend& backend, const PromptTemplate& tmpl, const IntentKey& key,
    int base_count, int factor, uint64_t seed, const GenerationOptions& options) {
  if (base_count < 1) fail(ErrorKind::Argument, "base_count must be >= 1");
  if (factor < 1) fail(ErrorKind::Argument, "factor must be >= 1");
  return run_generation(backend, tmpl, key, base_count * factor, seed, options,
                        /*want_probabilities=*/true);
}

}  // namespace intentsynth
