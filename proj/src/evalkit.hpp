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

#ifndef INTENTSYNTH_EVALKIT_HPP
#define INTENTSYNTH_EVALKIT_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"

namespace intentsynth {

struct ClassifierTrainSpec {
  int batch_size = 60;
  int max_steps = 1800;
  double train_fraction = 0.8;     // remainder is the validation part
  int early_stopping_patience = 3; // non-improving validation checks
  int eval_every = 100;            // steps between validation checks
  uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
  static ClassifierTrainSpec from_json(const nlohmann::json& j);
};

// A classifier under or after training. Prediction is restricted to the label
// set fixed at init time.
class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;
  virtual IntentKey predict(const std::string& text) const = 0;
  virtual double loss(std::span<const LabeledExample> examples) const = 0;
  virtual std::vector<IntentKey> labels() const = 0;
  virtual std::unique_ptr<ClassifierModel> clone() const = 0;
};

using ClassifierHandle = std::shared_ptr<ClassifierModel>;

// Step-level training interface so the training recipe (stratified split,
// step budget, batch size, early stopping) stays in the pipeline where it can
// be audited, while the model mathematics stay in the backend.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  virtual std::string id() const = 0;
  virtual ClassifierHandle init(const std::vector<IntentKey>& labels,
                                uint64_t seed) = 0;
  virtual void train_step(ClassifierModel& model,
                          std::span<const LabeledExample> batch) = 0;
};

// Seeded stratified split: per intent, train_fraction of the examples (floor,
// at least 1 when the bucket is non-empty) go to the first index list.
std::pair<std::vector<size_t>, std::vector<size_t>> stratified_split(
    const Corpus& data, double train_fraction, uint64_t seed);

// Trains on an 80/20 stratified split of train_data with early stopping on
// validation loss; returns the best-by-validation checkpoint.
ClassifierHandle train_intent_classifier(const Corpus& train_data,
                                         const ClassifierTrainSpec& spec,
                                         ClassifierBackend& backend);

// Fraction of exact (intent, domain) matches on human test data.
double evaluate_accuracy(const ClassifierModel& model, const Corpus& test);

// Per-intent documents: intent name -> utterances.
using IntentDocuments = std::map<std::string, std::vector<std::string>>;

// Mean over intents of |unique n-grams| / |words| on the concatenated
// per-intent document.
double distinct_n(const IntentDocuments& documents, int n);

// Equalizes per-intent word counts across datasets: the budget is the minimum
// total word count over datasets; utterances are drawn in seeded order and the
// last one is word-truncated to land exactly on the budget.
std::map<std::string, IntentDocuments> truncate_for_comparison(
    const std::map<std::string, IntentDocuments>& datasets, uint64_t seed);

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 0.5;
  bool significant = false;
};

// One-tailed paired t-test of mean(a) > mean(b). Zero-variance differences
// resolve by sign convention: positive mean -> p ~ 0, negative -> p ~ 1,
// all-zero -> p = 0.5.
TTestResult paired_t_test_one_tail(std::span<const double> a,
                                   std::span<const double> b, double alpha);

struct TrialReport {
  int trial_id = 0;
  std::string strategy_id;
  double accuracy = 0.0;
  double distinct1 = 0.0;
  double distinct2 = 0.0;
  int n_train_utterances = 0;

  nlohmann::ordered_json to_json() const;
  static TrialReport from_json(const nlohmann::json& j);
};

struct StrategyAggregate {
  std::string strategy_id;
  int n_trials = 0;
  bool single_trial = false;
  double accuracy_mean = 0.0, accuracy_stddev = 0.0;
  double distinct1_mean = 0.0, distinct1_stddev = 0.0;
  double distinct2_mean = 0.0, distinct2_stddev = 0.0;
  double mean_train_utterances = 0.0;
};

struct SignificanceEntry {
  std::string better;   // strategy hypothesized to be better
  std::string baseline;
  TTestResult accuracy_test;
};

struct AggregateReport {
  std::vector<StrategyAggregate> strategies;
  std::vector<SignificanceEntry> significance;  // refined vs each baseline

  nlohmann::ordered_json to_json() const;
};

AggregateReport aggregate_trials(const std::vector<TrialReport>& reports);

// "61.3 (4.9)"-style table over strategies; diversity columns use 3 decimals.
std::string format_report_table(const AggregateReport& report);

}  // namespace intentsynth

#endif  // INTENTSYNTH_EVALKIT_HPP
