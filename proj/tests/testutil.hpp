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

#ifndef INTENTSYNTH_TESTS_TESTUTIL_HPP
#define INTENTSYNTH_TESTS_TESTUTIL_HPP

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "backends.hpp"
#include "corpus.hpp"
#include "evalkit.hpp"
#include "genkit.hpp"
#include "rand.hpp"
#include "refiner.hpp"
#include "text.hpp"

namespace intentsynth::testutil {

namespace fs = std::filesystem;

inline fs::path fresh_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  fs::path dir = fs::temp_directory_path() /
                 ("intentsynth_" + tag + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// --- synthetic full-shape corpora -----------------------------------------

// 150 intents x (100 train + 30 test), mirroring the published shape.
inline Corpus synthetic_clinc_corpus(int train_per_intent = 100,
                                     int test_per_intent = 30) {
  std::vector<LabeledExample> examples;
  for (const auto& [domain, intents] : clinc150_intent_table()) {
    for (const std::string& intent : intents) {
      IntentKey key{intent, domain};
      for (int i = 0; i < train_per_intent; ++i) {
        examples.push_back(LabeledExample{
            "please " + intent + " sample " + std::to_string(i), key,
            Origin::Human, SplitTag::Train});
      }
      for (int i = 0; i < test_per_intent; ++i) {
        examples.push_back(LabeledExample{
            "could you " + intent + " case " + std::to_string(i), key,
            Origin::Human, SplitTag::Test});
      }
    }
  }
  return corpus_from_examples(DatasetName::Clinc150, std::move(examples));
}

// 46 intents over the 20 schema-guided domains with uneven per-intent counts
// (several above 200, several below), every example unassigned.
inline Corpus synthetic_sgd_corpus() {
  // 4 domains x 1 intent, 3 x 4, 4 x 3, 9 x 2 = 46 intents.
  const std::vector<std::string>& domains = sgd_domains();
  std::vector<int> intents_per_domain = {1, 1, 1, 1, 4, 4, 4, 3, 3, 3,
                                         3, 2, 2, 2, 2, 2, 2, 2, 2, 2};
  std::vector<LabeledExample> examples;
  int intent_serial = 0;
  for (size_t d = 0; d < domains.size(); ++d) {
    for (int k = 0; k < intents_per_domain[d]; ++k) {
      IntentKey key{"intent_" + std::to_string(intent_serial), domains[d]};
      const int count = 130 + (intent_serial * 37) % 290;  // 130..419
      for (int i = 0; i < count; ++i) {
        examples.push_back(LabeledExample{
            "user says " + key.intent + " number " + std::to_string(i), key,
            Origin::Human, SplitTag::Unassigned});
      }
      ++intent_serial;
    }
  }
  return corpus_from_examples(DatasetName::Sgd, std::move(examples));
}

// --- toy keyword domains ----------------------------------------------------

// Three domains x two intents with disjoint keyword vocabularies plus shared
// filler words. Both train and test splits are populated.
struct ToyWorld {
  std::vector<IntentKey> intents;
  std::map<IntentKey, std::vector<std::string>> keywords;
  std::vector<std::string> filler = {"please", "now", "today", "can", "you"};
  std::vector<std::string> junk = {"umm", "zxq", "blorp", "qqf", "wib", "nnt"};

  ToyWorld() {
    const std::vector<std::pair<std::string, std::string>> layout = {
        {"alpha", "aa"}, {"alpha", "ab"}, {"beta", "ba"},
        {"beta", "bb"},  {"gamma", "ca"}, {"gamma", "cb"}};
    for (const auto& [domain, intent] : layout) {
      IntentKey key{intent, domain};
      intents.push_back(key);
      for (int k = 0; k < 4; ++k) {
        keywords[key].push_back(intent + "word" + std::to_string(k));
      }
    }
  }

  std::string clean_utterance(const IntentKey& key, Rng& rng) const {
    const std::vector<std::string>& kws = keywords.at(key);
    std::string text = filler[rng.index(filler.size())];
    for (int k = 0; k < 3; ++k) text += " " + kws[rng.index(kws.size())];
    text += " " + filler[rng.index(filler.size())];
    return text;
  }

  std::string noisy_utterance(const IntentKey& key, Rng& rng) const {
    const std::vector<std::string>& kws = keywords.at(key);
    // Junk crowds out most of the keyword signal.
    std::string text = kws[rng.index(kws.size())];
    for (int k = 0; k < 5; ++k) text += " " + junk[rng.index(junk.size())];
    text += " " + filler[rng.index(filler.size())];
    return text;
  }

  Corpus corpus(int train_per_intent, int test_per_intent, uint64_t seed) const {
    std::vector<LabeledExample> examples;
    for (const IntentKey& key : intents) {
      Rng rng(seed_stream(seed, "toy", key.intent, key.domain));
      for (int i = 0; i < train_per_intent; ++i) {
        examples.push_back(LabeledExample{clean_utterance(key, rng), key,
                                          Origin::Human, SplitTag::Train});
      }
      for (int i = 0; i < test_per_intent; ++i) {
        examples.push_back(LabeledExample{clean_utterance(key, rng), key,
                                          Origin::Human, SplitTag::Test});
      }
    }
    return corpus_from_examples(DatasetName::Custom, std::move(examples));
  }

  // Scripted generator file. noise_rate picks how many of each intent's
  // scripted texts carry junk tokens; rates may differ per intent.
  void write_mock_script(const fs::path& path, int texts_per_intent,
                         const std::map<std::string, double>& noise_rate,
                         uint64_t seed, bool with_probabilities = false) const {
    std::string out;
    for (const IntentKey& key : intents) {
      Rng rng(seed_stream(seed, "script", key.intent, key.domain));
      double rate = 0.0;
      auto it = noise_rate.find(key.intent);
      if (it != noise_rate.end()) rate = it->second;
      nlohmann::ordered_json entry;
      entry["intent"] = key.intent;
      entry["domain"] = key.domain;
      std::vector<std::string> texts;
      for (int i = 0; i < texts_per_intent; ++i) {
        const bool noisy = rng.real01() < rate;
        texts.push_back(noisy ? noisy_utterance(key, rng) : clean_utterance(key, rng));
      }
      entry["texts"] = texts;
      if (with_probabilities) {
        std::vector<std::vector<double>> probs;
        for (const std::string& text : texts) {
          std::vector<double> p;
          for (size_t t = 0; t < tokenize_words(text).size(); ++t) {
            p.push_back(0.2 + 0.75 * rng.real01());
          }
          probs.push_back(std::move(p));
        }
        entry["token_probabilities"] = probs;
      }
      out += entry.dump();
      out += '\n';
    }
    write_file(path, out);
  }
};

// --- raw dataset fixtures ----------------------------------------------------

// Two intents, three utterances each (2 train + 1 test), plus oos entries that
// the loader must skip.
inline fs::path write_clinc_fixture(const fs::path& dir) {
  nlohmann::ordered_json j;
  j["train"] = nlohmann::json::array(
      {{"transfer one hundred dollars", "transfer"},
       {"move money to savings", "transfer"},
       {"freeze my account please", "freeze_account"},
       {"lock my account", "freeze_account"},
       {"gibberish text", "oos"}});
  j["test"] = nlohmann::json::array({{"wire funds now", "transfer"},
                                     {"put a hold on my account", "freeze_account"},
                                     {"more gibberish", "oos"}});
  const fs::path path = dir / "clinc_fixture.json";
  write_file(path, j.dump(2));
  return path;
}

// One dialogue with two user turns carrying distinct intents.
inline fs::path write_sgd_fixture(const fs::path& dir) {
  nlohmann::ordered_json dialogue;
  dialogue["dialogue_id"] = "1_00000";
  dialogue["services"] = {"Restaurants_1"};
  dialogue["turns"] = nlohmann::ordered_json::array();
  auto user_turn = [](const std::string& text, const std::string& service,
                      const std::string& intent) {
    nlohmann::ordered_json turn;
    turn["speaker"] = "USER";
    turn["utterance"] = text;
    turn["frames"] = nlohmann::ordered_json::array();
    nlohmann::ordered_json frame;
    frame["service"] = service;
    frame["state"] = {{"active_intent", intent}};
    turn["frames"].push_back(frame);
    return turn;
  };
  nlohmann::ordered_json system_turn;
  system_turn["speaker"] = "SYSTEM";
  system_turn["utterance"] = "how can I help";
  system_turn["frames"] = nlohmann::ordered_json::array();

  dialogue["turns"].push_back(
      user_turn("find me an italian place", "Restaurants_1", "FindRestaurants"));
  dialogue["turns"].push_back(system_turn);
  dialogue["turns"].push_back(
      user_turn("book a table for two", "Restaurants_1", "ReserveRestaurant"));

  nlohmann::ordered_json file = nlohmann::ordered_json::array({dialogue});
  const fs::path path = dir / "train" / "dialogues_001.json";
  write_file(path, file.dump(2));
  return dir;
}

// --- instrumented doubles ----------------------------------------------------

// Fixed-output generator that counts calls; registry-friendly.
class CountingGenerator : public GeneratorBackend {
 public:
  CountingGenerator(std::vector<std::string> texts, std::shared_ptr<int> calls)
      : texts_(std::move(texts)), calls_(std::move(calls)) {}

  std::string id() const override { return "counting"; }
  bool returns_token_probabilities() const override { return false; }
  bool is_deterministic() const override { return true; }

  GenerationResponse generate(const GenerationRequest& request) override {
    ++*calls_;
    GenerationResponse response;
    const size_t start = static_cast<size_t>(request.seed % texts_.size());
    for (size_t i = 0; i < texts_.size(); ++i) {
      response.texts.push_back(texts_[(start + i) % texts_.size()]);
    }
    return response;
  }

 private:
  std::vector<std::string> texts_;
  std::shared_ptr<int> calls_;
};

// Generator that fails a set number of calls before succeeding.
class FlakyGenerator : public GeneratorBackend {
 public:
  FlakyGenerator(int failures_before_success, std::vector<std::string> texts)
      : remaining_failures_(failures_before_success), texts_(std::move(texts)) {}

  std::string id() const override { return "flaky"; }
  bool returns_token_probabilities() const override { return false; }
  bool is_deterministic() const override { return false; }

  GenerationResponse generate(const GenerationRequest&) override {
    if (remaining_failures_-- > 0) {
      fail(ErrorKind::Backend, "scripted outage");
    }
    return GenerationResponse{texts_, {}};
  }

 private:
  int remaining_failures_;
  std::vector<std::string> texts_;
};

// Classifier backend that records the training recipe it observes. The model
// itself is a bag-of-words centroid so accuracy paths still work.
struct ClassifierCallLog {
  int init_calls = 0;
  std::vector<size_t> batch_sizes;
  std::vector<double> scripted_losses;  // consumed by loss(); cycles last value
  int loss_calls = 0;
};

class LoggingClassifierModel : public ClassifierModel {
 public:
  LoggingClassifierModel(std::vector<IntentKey> labels,
                         std::shared_ptr<ClassifierCallLog> log)
      : labels_(std::move(labels)), log_(std::move(log)) {}

  IntentKey predict(const std::string&) const override { return labels_.front(); }

  double loss(std::span<const LabeledExample>) const override {
    const int call = log_->loss_calls++;
    if (log_->scripted_losses.empty()) return 1.0;
    const size_t idx = std::min(static_cast<size_t>(call),
                                log_->scripted_losses.size() - 1);
    return log_->scripted_losses[idx];
  }

  std::vector<IntentKey> labels() const override { return labels_; }

  std::unique_ptr<ClassifierModel> clone() const override {
    return std::make_unique<LoggingClassifierModel>(labels_, log_);
  }

 private:
  std::vector<IntentKey> labels_;
  std::shared_ptr<ClassifierCallLog> log_;
};

class LoggingClassifierBackend : public ClassifierBackend {
 public:
  explicit LoggingClassifierBackend(std::shared_ptr<ClassifierCallLog> log)
      : log_(std::move(log)) {}

  std::string id() const override { return "calllog"; }

  ClassifierHandle init(const std::vector<IntentKey>& labels, uint64_t) override {
    ++log_->init_calls;
    return std::make_shared<LoggingClassifierModel>(labels, log_);
  }

  void train_step(ClassifierModel&, std::span<const LabeledExample> batch) override {
    log_->batch_sizes.push_back(batch.size());
  }

 private:
  std::shared_ptr<ClassifierCallLog> log_;
};

}  // namespace intentsynth::testutil

#endif  // INTENTSYNTH_TESTS_TESTUTIL_HPP
