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

#include <algorithm>
#include <cmath>
#include <set>

#include "backends.hpp"
#include "evalkit.hpp"
#include "splitter.hpp"
#include "testutil.hpp"

using namespace intentsynth;
namespace tu = intentsynth::testutil;

namespace {

// Brute-force distinct-n oracle on std::set of joined n-gram strings.
double distinct_oracle(const IntentDocuments& docs, int n) {
  double total = 0.0;
  for (const auto& [intent, utterances] : docs) {
    std::vector<std::string> words;
    for (const auto& u : utterances) {
      for (const auto& w : tokenize_words(u)) words.push_back(w);
    }
    std::set<std::vector<std::string>> grams;
    for (size_t i = 0; i + n <= words.size(); ++i) {
      grams.insert(std::vector<std::string>(words.begin() + i, words.begin() + i + n));
    }
    total += static_cast<double>(grams.size()) / static_cast<double>(words.size());
  }
  return total / static_cast<double>(docs.size());
}

size_t total_words(const std::vector<std::string>& utterances) {
  size_t n = 0;
  for (const auto& u : utterances) n += tokenize_words(u).size();
  return n;
}

}  // namespace

TEST_SUITE("evalkit") {
  TEST_CASE("distinct-n hand-enumerated example") {
    IntentDocuments docs{{"booking", {"book a flight", "book now"}}};
    // Concatenated document: book a flight book now (5 words).
    // Unique unigrams {book, a, flight, now} = 4 -> 0.8.
    // Unique bigrams {(book,a),(a,flight),(flight,book),(book,now)} = 4 -> 0.8.
    CHECK(distinct_n(docs, 1) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(distinct_n(docs, 2) == doctest::Approx(0.8).epsilon(1e-12));
  }

  TEST_CASE("distinct-1 on repeated single word is 1/L") {
    IntentDocuments docs{{"x", {"hey", "hey", "hey", "hey", "hey"}}};
    CHECK(distinct_n(docs, 1) == doctest::Approx(1.0 / 5.0).epsilon(1e-12));
  }

  TEST_CASE("distinct-1 of all-unique words is 1") {
    IntentDocuments docs{{"x", {"alpha beta gamma", "delta epsilon"}}};
    CHECK(distinct_n(docs, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("distinct-n matches the set-based oracle on random documents") {
    Rng rng(808);
    const std::vector<std::string> vocab = {"go",  "stop", "pay",  "send", "cash",
                                            "now", "help", "card", "hold", "it"};
    for (int trial = 0; trial < 50; ++trial) {
      IntentDocuments docs;
      const int n_intents = 1 + static_cast<int>(rng.index(4));
      for (int i = 0; i < n_intents; ++i) {
        std::vector<std::string> utterances;
        const int n_utt = 1 + static_cast<int>(rng.index(5));
        for (int u = 0; u < n_utt; ++u) {
          std::string text = vocab[rng.index(vocab.size())];
          const int n_words = 1 + static_cast<int>(rng.index(6));
          for (int w = 0; w < n_words; ++w) text += " " + vocab[rng.index(vocab.size())];
          utterances.push_back(text);
        }
        docs["intent_" + std::to_string(i)] = utterances;
      }
      for (int n : {1, 2}) {
        CHECK(distinct_n(docs, n) ==
              doctest::Approx(distinct_oracle(docs, n)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("appending a duplicate utterance never raises distinct-1") {
    Rng rng(909);
    const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::string> utterances;
      const int n_utt = 1 + static_cast<int>(rng.index(4));
      for (int u = 0; u < n_utt; ++u) {
        std::string text = vocab[rng.index(vocab.size())];
        for (int w = 0; w < 3; ++w) text += " " + vocab[rng.index(vocab.size())];
        utterances.push_back(text);
      }
      IntentDocuments before{{"x", utterances}};
      const double d_before = distinct_n(before, 1);
      utterances.push_back(utterances[rng.index(utterances.size())]);
      IntentDocuments after{{"x", utterances}};
      CHECK(distinct_n(after, 1) <= d_before + 1e-12);
    }
  }

  TEST_CASE("distinct-n argument errors") {
    CHECK_THROWS_AS(distinct_n({}, 1), Error);
    CHECK_THROWS_AS(distinct_n({{"x", {}}}, 1), Error);
    CHECK_THROWS_AS(distinct_n({{"x", {"ok"}}}, 0), Error);
  }

  TEST_CASE("truncate_for_comparison equalizes word counts exactly") {
    std::map<std::string, IntentDocuments> datasets;
    datasets["a"] = {{"x", {"one two three four five", "six seven eight nine ten",
                            "more words here too yes"}}};  // 15 words
    datasets["b"] = {{"x", {"just eight words in two utterances split",
                            "pad pad"}}};  // 10 words... 8 + 2
    datasets["c"] = {{"x", {"a b c d e f g h"}}};  // 8 words
    auto truncated = truncate_for_comparison(datasets, 4);
    const size_t budget = 8;
    for (const auto& [id, docs] : truncated) {
      CHECK(total_words(docs.at("x")) == budget);
    }

    SUBCASE("equal-length datasets are unchanged in word count") {
      std::map<std::string, IntentDocuments> equal;
      equal["a"] = {{"x", {"one two three"}}};
      equal["b"] = {{"x", {"uno dos tres"}}};
      auto t = truncate_for_comparison(equal, 9);
      CHECK(total_words(t["a"]["x"]) == 3);
      CHECK(total_words(t["b"]["x"]) == 3);
    }

    SUBCASE("three datasets truncate to the smallest, verified by recount") {
      std::map<std::string, IntentDocuments> three;
      auto make_doc = [](int words) {
        std::string text;
        for (int i = 0; i < words; ++i) {
          text += (i ? " w" : "w") + std::to_string(i);
        }
        return IntentDocuments{{"x", {text}}};
      };
      three["d100"] = make_doc(100);
      three["d90"] = make_doc(90);
      three["d80"] = make_doc(80);
      auto t = truncate_for_comparison(three, 11);
      for (const auto& [id, docs] : t) CHECK(total_words(docs.at("x")) == 80);
    }

    SUBCASE("missing intents are consistency errors") {
      std::map<std::string, IntentDocuments> bad;
      bad["a"] = {{"x", {"hello world"}}};
      bad["b"] = {{"y", {"other intent"}}};
      CHECK_THROWS_AS(truncate_for_comparison(bad, 1), Error);
    }
  }

  TEST_CASE("paired t test: pinned example and conventions") {
    // differences 7.2 4.9 3.1 5.7 2.6 applied to (a - b).
    std::vector<double> b = {10, 11, 12, 13, 14};
    std::vector<double> a = {17.2, 15.9, 15.1, 18.7, 16.6};
    TTestResult r = paired_t_test_one_tail(a, b, 0.05);
    CHECK(r.t_statistic == doctest::Approx(5.5661).epsilon(1e-3));
    CHECK(r.p_value == doctest::Approx(0.0025).epsilon(0.5));  // within ~1e-3 abs
    CHECK(std::fabs(r.p_value - 0.00256) < 1e-3);
    CHECK(r.significant);

    SUBCASE("identical samples: t = 0, p = 0.5, not significant") {
      TTestResult same = paired_t_test_one_tail(b, b, 0.05);
      CHECK(same.t_statistic == 0.0);
      CHECK(same.p_value == 0.5);
      CHECK_FALSE(same.significant);
    }
    SUBCASE("zero-variance positive differences are significant") {
      std::vector<double> up = {11, 12, 13, 14, 15};
      TTestResult r2 = paired_t_test_one_tail(up, b, 0.05);
      CHECK(std::isinf(r2.t_statistic));
      CHECK(r2.p_value == doctest::Approx(0.0));
      CHECK(r2.significant);
    }
    SUBCASE("zero-variance negative differences are not significant") {
      std::vector<double> down = {9, 10, 11, 12, 13};
      TTestResult r3 = paired_t_test_one_tail(down, b, 0.05);
      CHECK(r3.p_value == doctest::Approx(1.0));
      CHECK_FALSE(r3.significant);
    }
    SUBCASE("antisymmetry: swapping arguments maps p to 1 - p") {
      Rng rng(3434);
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 6; ++i) {
          x.push_back(rng.real01() * 10.0);
          y.push_back(rng.real01() * 10.0);
        }
        TTestResult fwd = paired_t_test_one_tail(x, y, 0.05);
        TTestResult rev = paired_t_test_one_tail(y, x, 0.05);
        CHECK(fwd.p_value + rev.p_value == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
    SUBCASE("length mismatch and tiny samples are argument errors") {
      CHECK_THROWS_AS(paired_t_test_one_tail(std::vector<double>{1.0},
                                             std::vector<double>{1.0}, 0.05),
                      Error);
      CHECK_THROWS_AS(paired_t_test_one_tail(std::vector<double>{1.0, 2.0},
                                             std::vector<double>{1.0}, 0.05),
                      Error);
    }
  }

  TEST_CASE("stratified split is seeded and stratified") {
    Corpus corpus = tu::ToyWorld().corpus(10, 0, 77);
    auto [train_idx, val_idx] = stratified_split(corpus, 0.8, 5);
    CHECK(train_idx.size() == 48);  // 6 intents x 8
    CHECK(val_idx.size() == 12);    // 6 intents x 2
    // Per-intent 80/20.
    std::map<IntentKey, int> train_counts;
    for (size_t i : train_idx) ++train_counts[corpus.examples()[i].key];
    for (const auto& [key, count] : train_counts) CHECK(count == 8);
    // Determinism + seed sensitivity.
    auto again = stratified_split(corpus, 0.8, 5);
    CHECK(again.first == train_idx);
    CHECK(again.second == val_idx);
    CHECK(stratified_split(corpus, 0.8, 6).first != train_idx);
  }

  TEST_CASE("classifier trainer: recipe conformance via call log") {
    Corpus corpus = tu::ToyWorld().corpus(50, 0, 3);  // 300 examples
    auto log = std::make_shared<tu::ClassifierCallLog>();
    // Strictly decreasing losses: no early stop, runs the full step budget.
    for (int i = 0; i < 200; ++i) log->scripted_losses.push_back(1.0 - i * 0.001);
    tu::LoggingClassifierBackend backend(log);
    ClassifierTrainSpec spec;
    spec.seed = 9;
    train_intent_classifier(corpus, spec, backend);
    CHECK(log->init_calls == 1);
    CHECK(log->batch_sizes.size() == 1800);
    for (size_t batch : log->batch_sizes) CHECK(batch == 60);

    SUBCASE("flat losses stop early after patience checks") {
      auto flat_log = std::make_shared<tu::ClassifierCallLog>();
      flat_log->scripted_losses = {1.0};  // constant
      tu::LoggingClassifierBackend flat_backend(flat_log);
      train_intent_classifier(corpus, spec, flat_backend);
      // First check improves on infinity; three non-improving checks follow.
      CHECK(flat_log->batch_sizes.size() == 400);
    }
  }

  TEST_CASE("full-shape seen pool trains under the default recipe") {
    ClassifierTrainSpec defaults;
    CHECK(defaults.batch_size == 60);
    CHECK(defaults.max_steps == 1800);
    CHECK(defaults.train_fraction == 0.8);

    Corpus corpus = tu::synthetic_clinc_corpus();
    auto plans = plan_clinc150_trials(3, 1);
    TrialBundle bundle = materialize_trial(plans[0], corpus);
    REQUIRE(bundle.seen_train.size() == 7500);
    auto backend = make_centroid_classifier();
    ClassifierTrainSpec spec;
    spec.seed = 1;
    auto model = train_intent_classifier(bundle.seen_train, spec, *backend);
    REQUIRE(model != nullptr);
    CHECK(model->labels().size() == 75);
    CHECK(evaluate_accuracy(*model, bundle.seen_train) == doctest::Approx(1.0));
  }

  TEST_CASE("classifier trainer argument errors") {
    tu::ToyWorld world;
    auto backend = make_centroid_classifier();
    ClassifierTrainSpec spec;
    Corpus empty;
    CHECK_THROWS_AS(train_intent_classifier(empty, spec, *backend), Error);

    std::vector<LabeledExample> single = {
        {"hello", {"only", "alpha"}, Origin::Human, SplitTag::Train},
        {"hello again", {"only", "alpha"}, Origin::Human, SplitTag::Train}};
    Corpus single_corpus = corpus_from_examples(DatasetName::Custom, std::move(single));
    CHECK_THROWS_AS(train_intent_classifier(single_corpus, spec, *backend), Error);
  }

  TEST_CASE("centroid classifier separates a toy world and is deterministic") {
    tu::ToyWorld world;
    Corpus train = world.corpus(30, 0, 12);
    Corpus test = world.corpus(0, 10, 13);
    auto backend = make_centroid_classifier();
    ClassifierTrainSpec spec;
    spec.seed = 4;
    auto model = train_intent_classifier(train, spec, *backend);
    CHECK(evaluate_accuracy(*model, train) == doctest::Approx(1.0));
    CHECK(evaluate_accuracy(*model, test) == doctest::Approx(1.0));
    auto model2 = train_intent_classifier(train, spec, *backend);
    CHECK(evaluate_accuracy(*model2, test) == evaluate_accuracy(*model, test));
  }

  TEST_CASE("accuracy: fixed-label predictor on a balanced test set") {
    Corpus clinc = tu::synthetic_clinc_corpus(1, 2);
    // 75-intent balanced slice as test data.
    std::vector<LabeledExample> subset;
    std::set<std::string> wanted = {"banking", "travel", "work", "home", "utility"};
    for (const LabeledExample& ex : clinc.examples()) {
      if (ex.split == SplitTag::Test && wanted.count(ex.key.domain)) {
        subset.push_back(ex);
      }
    }
    Corpus test = corpus_from_examples(DatasetName::Custom, std::move(subset));
    REQUIRE(test.by_intent().size() == 75);

    struct FixedModel : ClassifierModel {
      std::vector<IntentKey> all;
      IntentKey predict(const std::string&) const override { return all.front(); }
      double loss(std::span<const LabeledExample>) const override { return 1.0; }
      std::vector<IntentKey> labels() const override { return all; }
      std::unique_ptr<ClassifierModel> clone() const override {
        return std::make_unique<FixedModel>(*this);
      }
    };
    FixedModel fixed;
    fixed.all = test.intents();
    std::sort(fixed.all.begin(), fixed.all.end());
    CHECK(evaluate_accuracy(fixed, test) == doctest::Approx(1.0 / 75.0).epsilon(1e-9));

    SUBCASE("permutation invariance") {
      std::vector<LabeledExample> reversed(test.examples().rbegin(),
                                           test.examples().rend());
      Corpus reversed_corpus =
          corpus_from_examples(DatasetName::Custom, std::move(reversed));
      CHECK(evaluate_accuracy(fixed, reversed_corpus) ==
            evaluate_accuracy(fixed, test));
    }
    SUBCASE("unknown test label is a consistency error") {
      FixedModel narrow;
      narrow.all = {test.intents().front()};
      CHECK_THROWS_AS(evaluate_accuracy(narrow, test), Error);
    }
  }

  TEST_CASE("aggregate_trials: means, stddevs, significance") {
    std::vector<TrialReport> reports;
    const std::vector<double> refined_acc = {0.72, 0.74, 0.71, 0.73, 0.75};
    const std::vector<double> zerogen_acc = {0.62, 0.66, 0.63, 0.65, 0.64};
    for (int t = 0; t < 5; ++t) {
      reports.push_back({t, "zerogen", zerogen_acc[t], 0.1, 0.2, 100});
      reports.push_back({t, "refined", refined_acc[t], 0.15, 0.3, 100});
    }
    AggregateReport agg = aggregate_trials(reports);
    REQUIRE(agg.strategies.size() == 2);
    // Hand computation: mean of zerogen accuracies.
    const double zg_mean = (0.62 + 0.66 + 0.63 + 0.65 + 0.64) / 5.0;
    double ss = 0.0;
    for (double v : zerogen_acc) ss += (v - zg_mean) * (v - zg_mean);
    const double zg_sd = std::sqrt(ss / 4.0);
    CHECK(agg.strategies[0].strategy_id == "zerogen");
    CHECK(agg.strategies[0].accuracy_mean == doctest::Approx(zg_mean).epsilon(1e-12));
    CHECK(agg.strategies[0].accuracy_stddev == doctest::Approx(zg_sd).epsilon(1e-12));
    REQUIRE(agg.significance.size() == 1);
    CHECK(agg.significance[0].better == "refined");
    CHECK(agg.significance[0].baseline == "zerogen");
    CHECK(agg.significance[0].accuracy_test.significant);

    std::string table = format_report_table(agg);
    CHECK(table.find("refined") != std::string::npos);
    CHECK(table.find("(") != std::string::npos);  // mean (stddev) formatting
    CHECK(table.find("**") != std::string::npos);

    SUBCASE("single trial reports stddev zero with a flag") {
      std::vector<TrialReport> one = {{0, "zerogen", 0.5, 0.1, 0.2, 100}};
      AggregateReport single = aggregate_trials(one);
      CHECK(single.strategies[0].single_trial);
      CHECK(single.strategies[0].accuracy_stddev == 0.0);
    }
  }
}
