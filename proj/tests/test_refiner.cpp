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

#include <doctest.h>

#include <set>

#include "backends.hpp"
#include "refiner.hpp"
#include "testutil.hpp"

using namespace intentsynth;
namespace tu = intentsynth::testutil;

namespace {

PerIntentTexts numbered_texts(const std::vector<IntentKey>& keys, int count,
                              const std::string& prefix) {
  PerIntentTexts out;
  for (const IntentKey& key : keys) {
    for (int i = 0; i < count; ++i) {
      out[key].push_back(prefix + " " + key.intent + " " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("refiner") {
  TEST_CASE("config defaults reproduce the standard recipe") {
    RefinerConfig cfg;
    CHECK(cfg.m == 7);
    CHECK(cfg.n == 1);
    CHECK(cfg.epochs == 6);
    CHECK(cfg.batch_size == 24);
    CHECK(cfg.early_stopping_patience == 2);
    CHECK(cfg.validation_checks_per_epoch == 1);
    CHECK_FALSE(cfg.parameter_efficient);
    CHECK(RefinerConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
  }

  TEST_CASE("refiner prompt wording") {
    IntentKey key{"freeze_account", "banking"};
    std::vector<std::string> inputs = {"in one", "in two", "in three", "in four",
                                       "in five", "in six", "in seven"};
    std::string p1 = build_refiner_prompt(key, inputs, 1);
    CHECK(p1.rfind("Provide one improved expression.") ==
          p1.size() - std::string("Provide one improved expression.").size());
    CHECK(p1.find("\"freeze_account\"") != std::string::npos);
    CHECK(p1.find("\"banking\"") != std::string::npos);
    CHECK(p1.rfind("in one\nin two", 0) == 0);  // inputs listed one per line

    std::string p3 = build_refiner_prompt(key, inputs, 3);
    CHECK(p3.rfind("Provide three improved expressions.") ==
          p3.size() - std::string("Provide three improved expressions.").size());

    CHECK_THROWS_AS(build_refiner_prompt(key, std::vector<std::string>{}, 1), Error);
  }

  TEST_CASE("sample_training_pairs: one example per current utterance") {
    tu::ToyWorld world;
    std::vector<IntentKey> keys = {world.intents[0], world.intents[1]};
    PerIntentTexts gen = numbered_texts(keys, 100, "gen");
    PerIntentTexts real = numbered_texts(keys, 100, "real");
    RefinerConfig cfg;
    cfg.seed = 11;
    auto pairs = sample_training_pairs(gen, real, cfg);
    REQUIRE(pairs.size() == 200);

    std::map<IntentKey, int> per_intent;
    for (const RefinementExample& ex : pairs) {
      ++per_intent[ex.key];
      REQUIRE(ex.inputs.size() == 7);
      REQUIRE(ex.targets.size() == 1);
      // Every companion comes from the same intent's generated pool.
      for (const std::string& input : ex.inputs) {
        CHECK(input.find(ex.key.intent) != std::string::npos);
        CHECK(input.rfind("gen", 0) == 0);
      }
      CHECK(ex.targets[0].rfind("real", 0) == 0);
      CHECK(ex.rendered_target == ex.targets[0]);
      CHECK(ex.rendered_input.find("improved expression.") != std::string::npos);
    }
    CHECK(per_intent[keys[0]] == 100);
    CHECK(per_intent[keys[1]] == 100);

    // Slot 0 enumerates the generated set in order.
    for (int i = 0; i < 100; ++i) {
      CHECK(pairs[i].inputs[0] == gen[keys[0]][i]);
    }

    SUBCASE("pairing is a bijection onto the human set") {
      std::set<std::string> targets;
      for (int i = 0; i < 100; ++i) targets.insert(pairs[i].targets[0]);
      CHECK(targets.size() == 100);
    }
    SUBCASE("determinism") {
      CHECK(sample_training_pairs(gen, real, cfg) == pairs);
      RefinerConfig other = cfg;
      other.seed = 12;
      CHECK_FALSE(sample_training_pairs(gen, real, other) == pairs);
    }
  }

  TEST_CASE("m=1 n=1 degenerates to the current utterance alone") {
    tu::ToyWorld world;
    std::vector<IntentKey> keys = {world.intents[0]};
    RefinerConfig cfg;
    cfg.m = 1;
    cfg.seed = 2;
    auto pairs = sample_training_pairs(numbered_texts(keys, 5, "gen"),
                                       numbered_texts(keys, 5, "real"), cfg);
    for (const auto& ex : pairs) {
      CHECK(ex.inputs.size() == 1);
      CHECK(ex.inputs[0].rfind("gen", 0) == 0);
    }
  }

  TEST_CASE("n=3 draws distinct extra targets and renders them per line") {
    tu::ToyWorld world;
    std::vector<IntentKey> keys = {world.intents[0]};
    RefinerConfig cfg;
    cfg.n = 3;
    cfg.seed = 21;
    auto pairs = sample_training_pairs(numbered_texts(keys, 20, "gen"),
                                       numbered_texts(keys, 20, "real"), cfg);
    for (const auto& ex : pairs) {
      REQUIRE(ex.targets.size() == 3);
      std::set<std::string> unique(ex.targets.begin(), ex.targets.end());
      CHECK(unique.size() == 3);  // sampled without replacement
      CHECK(ex.rendered_target ==
            ex.targets[0] + "\n" + ex.targets[1] + "\n" + ex.targets[2]);
    }
  }

  TEST_CASE("within-example duplicates appear at the birthday-bound rate") {
    tu::ToyWorld world;
    // 100 intents' worth of data is overkill; reuse one intent with N=100 and
    // sample 10,000 examples by regenerating with distinct seeds.
    std::vector<IntentKey> keys = {world.intents[0]};
    PerIntentTexts gen = numbered_texts(keys, 100, "gen");
    PerIntentTexts real = numbered_texts(keys, 100, "real");
    int with_duplicate = 0;
    int total = 0;
    for (uint64_t seed = 0; seed < 100; ++seed) {
      RefinerConfig cfg;
      cfg.seed = seed;
      for (const RefinementExample& ex : sample_training_pairs(gen, real, cfg)) {
        CHECK(ex.inputs[0] == gen[keys[0]][total % 100]);
        std::set<std::string> unique(ex.inputs.begin(), ex.inputs.end());
        if (unique.size() < ex.inputs.size()) ++with_duplicate;
        ++total;
      }
    }
    CHECK(total == 10000);
    const double rate = static_cast<double>(with_duplicate) / total;
    CHECK(rate > 0.10);
    CHECK(rate < 0.30);
  }

  TEST_CASE("mismatched or empty sets are consistency errors") {
    tu::ToyWorld world;
    std::vector<IntentKey> keys = {world.intents[0]};
    RefinerConfig cfg;
    CHECK_THROWS_AS(sample_training_pairs(numbered_texts(keys, 5, "gen"),
                                          numbered_texts(keys, 4, "real"), cfg),
                    Error);
    PerIntentTexts empty_gen;
    empty_gen[keys[0]] = {};
    CHECK_THROWS_AS(
        sample_training_pairs(empty_gen, numbered_texts(keys, 1, "real"), cfg),
        Error);
    CHECK_THROWS_AS(sample_training_pairs(numbered_texts(keys, 5, "gen"),
                                          PerIntentTexts{}, cfg),
                    Error);
  }

  TEST_CASE("early stopper contract") {
    EarlyStopper stopper(2);
    CHECK_FALSE(stopper.offer(1.0));
    CHECK_FALSE(stopper.offer(0.9));
    CHECK_FALSE(stopper.offer(0.95));  // one non-improving
    CHECK(stopper.offer(0.97));        // second in a row -> stop
    CHECK(stopper.best_loss() == 0.9);
    CHECK(stopper.best_check() == 2);
    CHECK_THROWS_AS(EarlyStopper(0), Error);
  }

  TEST_CASE("backends stop after patience non-improving checks") {
    auto backend = make_echo_seq2seq();
    tu::ToyWorld world;
    std::vector<IntentKey> keys = {world.intents[0]};
    RefinerConfig cfg;
    cfg.seed = 5;
    cfg.epochs = 6;
    cfg.early_stopping_patience = 1;
    auto pairs = sample_training_pairs(numbered_texts(keys, 4, "gen"),
                                       numbered_texts(keys, 4, "real"), cfg);
    int checks = 0;
    double loss = 1.0;
    ValidationFn increasing = [&](const InferenceFn&) {
      ++checks;
      loss += 1.0;
      return loss;
    };
    backend->train(pairs, cfg, increasing);
    // First check sets the best; the second is non-improving and stops training.
    CHECK(checks == 2);
  }

  TEST_CASE("train_refiner with the echo double returns a slot-0 refiner") {
    tu::ToyWorld world;
    Corpus seen = world.corpus(20, 0, 31);
    auto classifier_backend = make_centroid_classifier();
    ClassifierTrainSpec spec;
    spec.seed = 8;
    auto classifier = train_intent_classifier(seen, spec, *classifier_backend);

    std::vector<IntentKey> val_keys = {world.intents[4], world.intents[5]};
    RefinerConfig cfg;
    cfg.seed = 77;
    ValidationMonitor monitor;
    monitor.classifier = classifier;
    // Validation examples drawn from the toy validation domain.
    PerIntentTexts val_gen;
    PerIntentTexts val_real;
    for (const IntentKey& key : val_keys) {
      val_gen[key] = seen.texts_for(key);
      val_real[key] = seen.texts_for(key);
    }
    monitor.val_examples = sample_training_pairs(val_gen, val_real, cfg);

    std::vector<IntentKey> train_keys = {world.intents[0], world.intents[1]};
    auto pairs = sample_training_pairs(numbered_texts(train_keys, 10, "gen"),
                                       numbered_texts(train_keys, 10, "real"), cfg);
    auto echo = make_echo_seq2seq();
    Seq2SeqHandle handle = train_refiner(pairs, cfg, *echo, monitor);
    REQUIRE(handle != nullptr);
    CHECK(handle->generate("first line\nsecond line\nprompt tail") == "first line");

    SUBCASE("missing classifier is a precondition error") {
      ValidationMonitor bad = monitor;
      bad.classifier = nullptr;
      CHECK_THROWS_AS(train_refiner(pairs, cfg, *echo, bad), Error);
    }
  }

  TEST_CASE("refine_corpus with the echo model reproduces slot-0 inputs") {
    tu::ToyWorld world;
    std::vector<IntentKey> keys = {world.intents[0], world.intents[1]};
    PerIntentTexts gen = numbered_texts(keys, 25, "gen");
    auto echo = make_echo_seq2seq();
    Seq2SeqHandle model = echo->load(nlohmann::json{{"kind", "echo"}});
    RefinerConfig cfg;
    cfg.seed = 3;
    RefineResult result = refine_corpus(*model, gen, cfg, 99);
    CHECK(result.passthrough_count == 0);
    for (const IntentKey& key : keys) {
      CHECK(result.corpus.texts_for(key) == gen[key]);
    }
    for (const LabeledExample& ex : result.corpus.examples()) {
      CHECK(ex.origin == Origin::Refined);
    }
    SUBCASE("determinism") {
      RefineResult again = refine_corpus(*model, gen, cfg, 99);
      CHECK(again.corpus == result.corpus);
    }
    SUBCASE("per-intent cap truncates output") {
      RefineResult capped = refine_corpus(*model, gen, cfg, 99, 10);
      for (const IntentKey& key : keys) {
        CHECK(capped.corpus.texts_for(key).size() == 10);
      }
    }
  }

  TEST_CASE("empty refinement output falls back to the current utterance") {
    struct BlankModel : Seq2SeqModel {
      std::string kind() const override { return "blank"; }
      std::string generate(const std::string&) const override { return "  "; }
      nlohmann::ordered_json save() const override {
        return nlohmann::ordered_json{{"kind", "blank"}};
      }
    };
    tu::ToyWorld world;
    std::vector<IntentKey> keys = {world.intents[0]};
    PerIntentTexts gen = numbered_texts(keys, 8, "gen");
    BlankModel blank;
    RefinerConfig cfg;
    RefineResult result = refine_corpus(blank, gen, cfg, 1);
    CHECK(result.passthrough_count == 8);
    CHECK(result.corpus.texts_for(keys[0]) == gen[keys[0]]);
  }

  TEST_CASE("denoise backend learns input-only tokens and keeps unseen words") {
    tu::ToyWorld world;
    std::vector<IntentKey> train_keys = {world.intents[0], world.intents[1]};
    PerIntentTexts gen;
    PerIntentTexts real;
    for (const IntentKey& key : train_keys) {
      for (int i = 0; i < 10; ++i) {
        gen[key].push_back("zxq please " + key.intent + " zxq now");
        real[key].push_back("please " + key.intent + " now");
      }
    }
    RefinerConfig cfg;
    cfg.seed = 6;
    auto pairs = sample_training_pairs(gen, real, cfg);
    auto backend = make_denoise_seq2seq(3);
    ValidationFn no_validation;
    Seq2SeqHandle model = backend->train(pairs, cfg, no_validation);
    // Junk is deleted, unseen-domain words survive.
    CHECK(model->generate("zxq freeze my crystal zxq account\nrest of prompt") ==
          "freeze my crystal account");
    // Round trip through save/load.
    Seq2SeqHandle reloaded = backend->load(model->save());
    CHECK(reloaded->generate("zxq hello") == "hello");
  }
}
