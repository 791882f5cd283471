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

#include "refiner.hpp"

#include <algorithm>

#include "rand.hpp"
#include "text.hpp"

namespace intentsynth {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json RefinerConfig::to_json() const {
  ordered_json j;
  j["m"] = m;
  j["n"] = n;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["early_stopping_patience"] = early_stopping_patience;
  j["validation_checks_per_epoch"] = validation_checks_per_epoch;
  j["parameter_efficient"] = parameter_efficient;
  j["seed"] = seed;
  return j;
}

RefinerConfig RefinerConfig::from_json(const json& j) {
  RefinerConfig c;
  c.m = j.value("m", c.m);
  c.n = j.value("n", c.n);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.early_stopping_patience = j.value("early_stopping_patience", c.early_stopping_patience);
  c.validation_checks_per_epoch =
      j.value("validation_checks_per_epoch", c.validation_checks_per_epoch);
  c.parameter_efficient = j.value("parameter_efficient", c.parameter_efficient);
  c.seed = j.value("seed", c.seed);
  return c;
}

std::string build_refiner_prompt(const IntentKey& key,
                                 std::span<const std::string> inputs,
                                 int n_outputs) {
  if (inputs.empty()) fail(ErrorKind::Argument, "refiner prompt needs at least one input");
  if (n_outputs < 1) fail(ErrorKind::Argument, "n_outputs must be >= 1");
  std::string prompt;
  for (const std::string& input : inputs) {
    prompt += input;
    prompt += '\n';
  }
  prompt += "The sentences above are user intent expressions for \"" + key.intent +
            "\" in the \"" + key.domain +
            "\" context, but they might have less quality or contain mistakes. "
            "Provide " + number_word(n_outputs) + " improved expression" +
            (n_outputs > 1 ? "s" : "") + ".";
  return prompt;
}

namespace {

void validate_pair_sets(const PerIntentTexts& generated, const PerIntentTexts& human,
                        const RefinerConfig& config) {
  if (config.m < 1 || config.n < 1) {
    fail(ErrorKind::Argument, "refiner config needs m >= 1 and n >= 1");
  }
  if (generated.size() != human.size()) {
    fail(ErrorKind::Consistency, "generated and human sets cover different intents");
  }
  for (const auto& [key, gen_texts] : generated) {
    auto it = human.find(key);
    if (it == human.end()) {
      fail(ErrorKind::Consistency,
           "no human utterances for intent '" + key.intent + "'");
    }
    if (gen_texts.empty() || it->second.empty()) {
      fail(ErrorKind::Consistency,
           "intent '" + key.intent + "' has an empty generated or human set");
    }
    if (gen_texts.size() != it->second.size()) {
      fail(ErrorKind::Consistency,
           "intent '" + key.intent + "': generated count " +
               std::to_string(gen_texts.size()) + " != human count " +
               std::to_string(it->second.size()));
    }
    if (static_cast<size_t>(config.n) > it->second.size()) {
      fail(ErrorKind::Consistency,
           "intent '" + key.intent + "' has fewer human utterances than n");
    }
  }
}

// Slot 0 is the current utterance; the rest are drawn with replacement from
// the same intent's generated set.
std::vector<std::string> build_context(const std::vector<std::string>& pool,
                                       size_t current, int m, Rng& rng) {
  std::vector<std::string> inputs;
  inputs.reserve(m);
  inputs.push_back(pool[current]);
  for (int k = 1; k < m; ++k) inputs.push_back(pool[rng.index(pool.size())]);
  return inputs;
}

}  // namespace

std::vector<RefinementExample> sample_training_pairs(const PerIntentTexts& generated,
                                                     const PerIntentTexts& human,
                                                     const RefinerConfig& config) {
  validate_pair_sets(generated, human, config);

  std::vector<RefinementExample> pairs;
  for (const auto& [key, gen_texts] : generated) {
    const std::vector<std::string>& real_texts = human.at(key);
    const size_t n_examples = gen_texts.size();

    // Random bijection between generated and human indices, fixed by seed.
    std::vector<size_t> pairing(n_examples);
    for (size_t i = 0; i < n_examples; ++i) pairing[i] = i;
    Rng pairing_rng(seed_stream(config.seed, "pairing", key.intent, key.domain));
    pairing_rng.shuffle(pairing);

    Rng context_rng(seed_stream(config.seed, "context", key.intent, key.domain));
    for (size_t i = 0; i < n_examples; ++i) {
      RefinementExample ex;
      ex.key = key;
      ex.inputs = build_context(gen_texts, i, config.m, context_rng);

      ex.targets.push_back(real_texts[pairing[i]]);
      if (config.n > 1) {
        // Further targets without replacement, skipping the paired one.
        std::vector<size_t> others;
        others.reserve(n_examples - 1);
        for (size_t j = 0; j < n_examples; ++j) {
          if (j != pairing[i]) others.push_back(j);
        }
        for (size_t local : context_rng.sample_indices(others.size(),
                                                       static_cast<size_t>(config.n) - 1)) {
          ex.targets.push_back(real_texts[others[local]]);
        }
      }

      ex.rendered_input = build_refiner_prompt(key, ex.inputs, config.n);
      ex.rendered_target = join(ex.targets, "\n");
      pairs.push_back(std::move(ex));
    }
  }
  return pairs;
}

EarlyStopper::EarlyStopper(int patience) : patience_(patience) {
  if (patience < 1) fail(ErrorKind::Argument, "patience must be >= 1");
}

bool EarlyStopper::offer(double loss) {
  ++checks_;
  if (best_check_ < 0 || loss < best_loss_) {
    best_loss_ = loss;
    best_check_ = checks_;
    non_improving_ = 0;
    return false;
  }
  ++non_improving_;
  return non_improving_ >= patience_;
}

double ValidationMonitor::score(const InferenceFn& infer) const {
  if (!classifier) {
    fail(ErrorKind::Argument, "validation monitor has no trained classifier");
  }
  if (val_examples.empty()) {
    fail(ErrorKind::Argument, "validation monitor has no examples");
  }
  std::vector<LabeledExample> refined;
  for (const RefinementExample& ex : val_examples) {
    std::string output = infer(ex.rendered_input);
    std::vector<std::string> parts = split_lines(output);
    if (parts.empty()) parts.push_back(output);
    int taken = 0;
    for (const std::string& part : parts) {
      if (taken >= n_outputs) break;
      std::string text = cleanup_text(part, cleanup);
      if (text.empty()) continue;
      refined.push_back(LabeledExample{text, ex.key, Origin::Refined,
                                       SplitTag::Validation});
      ++taken;
    }
    if (taken == 0) {
      // Empty refinement falls back to the current utterance.
      refined.push_back(LabeledExample{ex.inputs.front(), ex.key, Origin::Refined,
                                       SplitTag::Validation});
    }
  }
  return classifier->loss(refined);
}

Seq2SeqHandle train_refiner(std::span<const RefinementExample> pairs,
                            const RefinerConfig& config, Seq2SeqBackend& backend,
                            const ValidationMonitor& monitor) {
  if (pairs.empty()) fail(ErrorKind::Argument, "no training pairs given");
  if (!monitor.classifier) {
    fail(ErrorKind::Argument, "monitor classifier is not trained");
  }
  ValidationFn validate = [&monitor](const InferenceFn& infer) {
    return monitor.score(infer);
  };
  Seq2SeqHandle handle = backend.train(pairs, config, validate);
  if (!handle) fail(ErrorKind::Backend, "seq2seq backend returned no model");
  return handle;
}

RefineResult refine_corpus(const Seq2SeqModel& model, const PerIntentTexts& generated,
                           const RefinerConfig& config, uint64_t seed,
                           std::optional<size_t> per_intent_cap,
                           const CleanupRules& cleanup) {
  if (config.m < 1 || config.n < 1) {
    fail(ErrorKind::Argument, "refiner config needs m >= 1 and n >= 1");
  }
  RefineResult result;
  std::vector<LabeledExample> out;
  for (const auto& [key, gen_texts] : generated) {
    if (gen_texts.empty()) {
      fail(ErrorKind::Consistency,
           "intent '" + key.intent + "' has no generated utterances to refine");
    }
    const size_t cap = per_intent_cap.value_or(
        config.n == 1 ? gen_texts.size() : gen_texts.size() * config.n);
    Rng context_rng(seed_stream(seed, "refine_context", key.intent, key.domain));
    size_t emitted = 0;
    for (size_t i = 0; i < gen_texts.size() && emitted < cap; ++i) {
      std::vector<std::string> inputs =
          build_context(gen_texts, i, config.m, context_rng);
      std::string output = model.generate(build_refiner_prompt(key, inputs, config.n));
      std::vector<std::string> parts = split_lines(output);
      if (parts.empty()) parts.push_back(output);

      size_t taken = 0;
      for (const std::string& part : parts) {
        if (taken >= static_cast<size_t>(config.n) || emitted >= cap) break;
        std::string text = cleanup_text(part, cleanup);
        if (text.empty()) continue;
        out.push_back(LabeledExample{std::move(text), key, Origin::Refined,
                                     SplitTag::Train});
        ++taken;
        ++emitted;
      }
      if (taken == 0 && emitted < cap) {
        // Nothing usable came back; keep the current utterance so the sample
        // size is preserved.
        out.push_back(LabeledExample{gen_texts[i], key, Origin::Refined,
                                     SplitTag::Train});
        ++emitted;
        ++result.passthrough_count;
      }
    }
  }

  DatasetDescriptor desc;
  desc.name = DatasetName::Custom;
  std::map<std::string, std::set<std::string>> by_domain;
  for (const auto& [key, texts] : generated) by_domain[key.domain].insert(key.intent);
  for (const auto& [domain, intents] : by_domain) {
    desc.domains.push_back(domain);
    desc.intents_per_domain[domain] =
        std::vector<std::string>(intents.begin(), intents.end());
  }
  result.corpus = Corpus(std::move(out), std::move(desc));
  return result;
}

}  // namespace intentsynth
