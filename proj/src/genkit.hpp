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

#ifndef INTENTSYNTH_GENKIT_HPP
#define INTENTSYNTH_GENKIT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "errors.hpp"

namespace intentsynth {

struct GenerationRequest {
  std::string prompt;
  int max_new_tokens = 256;
  double temperature = 1.0;
  uint64_t seed = 0;
  bool want_token_probabilities = false;
};

struct GenerationResponse {
  std::vector<std::string> texts;
  // Parallel to texts when the backend reports per-token probabilities;
  // empty otherwise.
  std::vector<std::vector<double>> token_probabilities;
};

// Abstract text generator. Implementations: scripted mock, remote JSON
// endpoint, plus whatever tests register.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;

  virtual std::string id() const = 0;
  virtual bool returns_token_probabilities() const = 0;
  virtual bool is_deterministic() const = 0;
  virtual bool supports_concurrent_calls() const { return false; }

  // Returns at least one candidate per call or throws ErrorKind::Backend.
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
};

struct PromptTemplate {
  std::string template_id;
  std::string body;  // placeholders: {intent}, {domain}, {count}

  static PromptTemplate default_generation();
};

std::string build_generation_prompt(const PromptTemplate& tmpl,
                                    const IntentKey& key, int count);

// Post-processing for raw model output. Rules are individually toggleable;
// the default keeps only quote and list-marker stripping so the refinement
// stage still sees the raw generation artifacts it is meant to repair.
struct CleanupRules {
  bool strip_quotes = true;
  bool strip_list_markers = true;
  bool strip_user_prefix = false;
  bool drop_trailing_parenthetical = false;
  bool collapse_whitespace = false;

  static CleanupRules minimal() { return CleanupRules{}; }
  static CleanupRules full() {
    return CleanupRules{true, true, true, true, true};
  }
};

std::string cleanup_text(std::string_view raw, const CleanupRules& rules);

struct GenerationRecord {
  std::string text;
  IntentKey key;
  std::vector<double> token_probabilities;  // empty when unavailable
  std::string prompt_id;
  std::string backend_id;
  std::string strategy;  // stamped by the selection stage

  bool operator==(const GenerationRecord&) const = default;
};

struct GenerationOptions {
  int max_retries = 3;  // consecutive failed/empty calls tolerated
  int max_new_tokens = 256;
  double temperature = 1.0;
  CleanupRules cleanup = CleanupRules::minimal();
};

// Carries whatever was produced before the backend gave up.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& message, std::vector<GenerationRecord> partial)
      : Error(ErrorKind::Backend, message), partial_(std::move(partial)) {}

  const std::vector<GenerationRecord>& partial_results() const { return partial_; }

 private:
  std::vector<GenerationRecord> partial_;
};

// Prompts the backend until exactly `count` post-processed utterances exist
// for `key`. Candidates that come back empty after cleanup are discarded and
// regenerated; duplicates are intentionally kept.
std::vector<GenerationRecord> generate_for_intent(GeneratorBackend& backend,
                                                  const PromptTemplate& tmpl,
                                                  const IntentKey& key, int count,
                                                  uint64_t seed,
                                                  const GenerationOptions& options = {});

// base_count x factor records, each with token probabilities, for
// confidence-based selection. The backend must report probabilities.
std::vector<GenerationRecord> oversample_for_selection(
    GeneratorBackend& backend, const PromptTemplate& tmpl, const IntentKey& key,
    int base_count, int factor, uint64_t seed,
    const GenerationOptions& options = {});

}  // namespace intentsynth

#endif  // INTENTSYNTH_GENKIT_HPP
