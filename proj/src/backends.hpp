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

#ifndef INTENTSYNTH_BACKENDS_HPP
#define INTENTSYNTH_BACKENDS_HPP

#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "evalkit.hpp"
#include "genkit.hpp"
#include "refiner.hpp"

namespace intentsynth {

struct BackendSpec {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::ordered_json to_json() const;
  static BackendSpec from_json(const nlohmann::json& j);
};

// Factories keyed by spec kind. Built-ins:
//   generator: "mock" (scripted JSONL), "remote" (JSON-over-HTTP endpoint)
//   seq2seq:   "echo" (returns the current utterance), "denoise" (learned
//              deletion list of tokens seen in inputs but never in targets)
//   classifier:"centroid" (bag-of-words nearest centroid)
// Additional kinds can be registered (tests use this for instrumented doubles).
using GeneratorFactory =
    std::function<std::unique_ptr<GeneratorBackend>(const nlohmann::json&)>;
using Seq2SeqFactory =
    std::function<std::unique_ptr<Seq2SeqBackend>(const nlohmann::json&)>;
using ClassifierFactory =
    std::function<std::unique_ptr<ClassifierBackend>(const nlohmann::json&)>;

void register_generator_backend(const std::string& kind, GeneratorFactory factory);
void register_seq2seq_backend(const std::string& kind, Seq2SeqFactory factory);
void register_classifier_backend(const std::string& kind, ClassifierFactory factory);

std::unique_ptr<GeneratorBackend> make_generator_backend(const BackendSpec& spec);
std::unique_ptr<Seq2SeqBackend> make_seq2seq_backend(const BackendSpec& spec);
std::unique_ptr<ClassifierBackend> make_classifier_backend(const BackendSpec& spec);

// Scripted generator: a JSONL file of
//   {"intent": ..., "domain": ..., "texts": [...],
//    "token_probabilities": [[...], ...]?}
// Each call returns the matching intent's texts starting at a seed-derived
// offset, so output depends only on (script, request seed).
std::unique_ptr<GeneratorBackend> make_mock_generator(const std::filesystem::path& script);

// Remote generator speaking the minimal JSON contract:
//   request  {prompt, max_new_tokens, temperature, seed, want_token_probabilities}
//   response {texts: [...], token_probabilities: [[...], ...]?}
// INTENTSYNTH_REMOTE_ENDPOINT / INTENTSYNTH_REMOTE_TOKEN override the spec.
struct RemoteBackendOptions {
  std::string endpoint;
  std::string token;
  bool token_probabilities = false;
  bool deterministic = false;
  int timeout_seconds = 60;
};
std::unique_ptr<GeneratorBackend> make_remote_generator(RemoteBackendOptions options);

std::unique_ptr<Seq2SeqBackend> make_echo_seq2seq();
std::unique_ptr<Seq2SeqBackend> make_denoise_seq2seq(int min_input_count = 3);
std::unique_ptr<ClassifierBackend> make_centroid_classifier();

}  // namespace intentsynth

#endif  // INTENTSYNTH_BACKENDS_HPP
