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

#ifndef INTENTSYNTH_REFINER_HPP
#define INTENTSYNTH_REFINER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "evalkit.hpp"
#include "genkit.hpp"

namespace intentsynth {

struct RefinerConfig {
  int m = 7;                         // inputs: current utterance + m-1 sampled
  int n = 1;                         // target utterances per example
  int epochs = 6;
  int batch_size = 24;
  int early_stopping_patience = 2;   // non-improving validation checks
  int validation_checks_per_epoch = 1;
  bool parameter_efficient = false;  // low-rank adaptation flag, backend-defined
  uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
  static RefinerConfig from_json(const nlohmann::json& j);
};

// One m-to-n training pair: m generated inputs (slot 0 is the "current"
// utterance) against n human targets sharing the same intent.
struct RefinementExample {
  std::vector<std::string> inputs;
  std::vector<std::string> targets;
  IntentKey key;
  std::string rendered_input;
  std::string rendered_target;

  bool operator==(const RefinementExample&) const = default;
};

// Inputs listed one per line, then the instruction naming the intent and
// domain and asking for the spelled-out number of improved expressions.
std::string build_refiner_prompt(const IntentKey& key,
                                 std::span<const std::string> inputs,
                                 int n_outputs = 1);

using PerIntentTexts = std::map<IntentKey, std::vector<std::string>>;

// For every intent: one example per generated "current" utterance, companions
// sampled with replacement from the same generated set, and targets drawn
// from the human set via a seeded random pairing. Requires
// |generated| == |human| per intent.
std::vector<RefinementExample> sample_training_pairs(const PerIntentTexts& generated,
                                                     const PerIntentTexts& human,
                                                     const RefinerConfig& config);

// A trained sequence-to-sequence model. Implementations define their own
// persistence; save() returns enough state to reload via the owning backend.
class Seq2SeqModel {
 public:
  virtual ~Seq2SeqModel() = default;
  virtual std::string kind() const = 0;
  virtual std::string generate(const std::string& rendered_input) const = 0;
  virtual nlohmann::ordered_json save() const = 0;
};

using Seq2SeqHandle = std::shared_ptr<const Seq2SeqModel>;

using InferenceFn = std::function<std::string(const std::string&)>;
// Scores the current model state; lower is better. Returning true from the
// paired stopper means training should halt.
using ValidationFn = std::function<double(const InferenceFn&)>;

class Seq2SeqBackend {
 public:
  virtual ~Seq2SeqBackend() = default;
  virtual std::string id() const = 0;
  virtual bool is_deterministic() const = 0;

  // Consumes (rendered_input, rendered_target) pairs. The backend invokes
  // `validate` once per validation check and must stop early when told to,
  // returning the checkpoint with the best validation score.
  virtual Seq2SeqHandle train(std::span<const RefinementExample> pairs,
                              const RefinerConfig& config,
                              const ValidationFn& validate) = 0;

  virtual Seq2SeqHandle load(const nlohmann::json& saved) = 0;
};

// Tracks non-improving validation checks; offer() returns true when training
// should stop. The best score and its check index drive checkpoint choice.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience);

  bool offer(double loss);
  int checks() const { return checks_; }
  int best_check() const { return best_check_; }
  double best_loss() const { return best_loss_; }

 private:
  int patience_;
  int checks_ = 0;
  int best_check_ = -1;
  double best_loss_ = 0.0;
  int non_improving_ = 0;
};

// Scores refiner checkpoints by refining validation-domain inputs and taking
// the frozen intent classifier's loss on the outputs.
struct ValidationMonitor {
  std::shared_ptr<const ClassifierModel> classifier;
  std::vector<RefinementExample> val_examples;
  int n_outputs = 1;
  CleanupRules cleanup = CleanupRules::minimal();

  double score(const InferenceFn& infer) const;
};

Seq2SeqHandle train_refiner(std::span<const RefinementExample> pairs,
                            const RefinerConfig& config, Seq2SeqBackend& backend,
                            const ValidationMonitor& monitor);

struct RefineResult {
  Corpus corpus;
  int passthrough_count = 0;  // model outputs empty after cleanup
};

// Refines every generated utterance: same context-sampling rule as training,
// model output split into at most n utterances, cleaned, and emitted with
// origin=refined. Empty outputs fall back to the current utterance. When
// per_intent_cap is set, per-intent output is truncated to it.
RefineResult refine_corpus(const Seq2SeqModel& model, const PerIntentTexts& generated,
                           const RefinerConfig& config, uint64_t seed,
                           std::optional<size_t> per_intent_cap = std::nullopt,
                           const CleanupRules& cleanup = CleanupRules::minimal());

}  // namespace intentsynth

#endif  // INTENTSYNTH_REFINER_HPP
