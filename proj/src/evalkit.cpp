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

#include "evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "rand.hpp"
#include "stats.hpp"
#include "text.hpp"

namespace intentsynth {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json ClassifierTrainSpec::to_json() const {
  ordered_json j;
  j["batch_size"] = batch_size;
  j["max_steps"] = max_steps;
  j["train_fraction"] = train_fraction;
  j["early_stopping_patience"] = early_stopping_patience;
  j["eval_every"] = eval_every;
  j["seed"] = seed;
  return j;
}

ClassifierTrainSpec ClassifierTrainSpec::from_json(const json& j) {
  ClassifierTrainSpec s;
  s.batch_size = j.value("batch_size", s.batch_size);
  s.max_steps = j.value("max_steps", s.max_steps);
  s.train_fraction = j.value("train_fraction", s.train_fraction);
  s.early_stopping_patience = j.value("early_stopping_patience", s.early_stopping_patience);
  s.eval_every = j.value("eval_every", s.eval_every);
  s.seed = j.value("seed", s.seed);
  return s;
}

std::pair<std::vector<size_t>, std::vector<size_t>> stratified_split(
    const Corpus& data, double train_fraction, uint64_t seed) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    fail(ErrorKind::Argument, "train_fraction must lie in (0, 1)");
  }
  std::vector<size_t> train_idx;
  std::vector<size_t> val_idx;
  for (const auto& [key, positions] : data.by_intent()) {
    std::vector<size_t> bucket = positions;
    Rng rng(seed_stream(seed, "clf_split", key.intent, key.domain));
    rng.shuffle(bucket);
    size_t n_train = static_cast<size_t>(
        std::floor(train_fraction * static_cast<double>(bucket.size())));
    if (n_train == 0 && !bucket.empty()) n_train = 1;
    if (n_train == bucket.size() && bucket.size() > 1) n_train = bucket.size() - 1;
    for (size_t i = 0; i < bucket.size(); ++i) {
      (i < n_train ? train_idx : val_idx).push_back(bucket[i]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {train_idx, val_idx};
}

ClassifierHandle train_intent_classifier(const Corpus& train_data,
                                         const ClassifierTrainSpec& spec,
                                         ClassifierBackend& backend) {
  if (train_data.empty()) fail(ErrorKind::Argument, "training corpus is empty");
  if (train_data.by_intent().size() < 2) {
    fail(ErrorKind::Argument, "classifier training needs at least two intents");
  }
  if (spec.batch_size < 1 || spec.max_steps < 1 || spec.eval_every < 1) {
    fail(ErrorKind::Argument, "classifier training spec has non-positive sizes");
  }

  auto [train_idx, val_idx] = stratified_split(train_data, spec.train_fraction, spec.seed);
  std::vector<LabeledExample> train_part;
  std::vector<LabeledExample> val_part;
  train_part.reserve(train_idx.size());
  val_part.reserve(val_idx.size());
  for (size_t i : train_idx) train_part.push_back(train_data.examples()[i]);
  for (size_t i : val_idx) val_part.push_back(train_data.examples()[i]);

  ClassifierHandle model = backend.init(train_data.intents(), spec.seed);
  if (!model) fail(ErrorKind::Backend, "classifier backend returned a null model");

  // Batches cycle through a reshuffled epoch order; every batch has exactly
  // batch_size examples (wrapping into the next epoch when needed).
  std::vector<size_t> order(train_part.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng order_rng(seed_stream(spec.seed, "clf_order"));
  order_rng.shuffle(order);
  size_t cursor = 0;

  std::unique_ptr<ClassifierModel> best = model->clone();
  double best_loss = std::numeric_limits<double>::infinity();
  int non_improving = 0;
  bool stopped = false;

  std::vector<LabeledExample> batch;
  batch.reserve(spec.batch_size);
  for (int step = 1; step <= spec.max_steps && !stopped; ++step) {
    batch.clear();
    for (int k = 0; k < spec.batch_size; ++k) {
      if (cursor == order.size()) {
        order_rng.shuffle(order);
        cursor = 0;
      }
      batch.push_back(train_part[order[cursor++]]);
    }
    backend.train_step(*model, batch);

    if (step % spec.eval_every == 0 || step == spec.max_steps) {
      const double val_loss =
          val_part.empty() ? model->loss(train_part) : model->loss(val_part);
      if (val_loss < best_loss) {
        best_loss = val_loss;
        best = model->clone();
        non_improving = 0;
      } else {
        ++non_improving;
        if (non_improving >= spec.early_stopping_patience) stopped = true;
      }
    }
  }
  return ClassifierHandle(std::move(best));
}

double evaluate_accuracy(const ClassifierModel& model, const Corpus& test) {
  if (test.empty()) fail(ErrorKind::Argument, "test corpus is empty");
  std::set<IntentKey> known;
  for (const IntentKey& k : model.labels()) known.insert(k);
  size_t hits = 0;
  for (const LabeledExample& ex : test.examples()) {
    if (!known.count(ex.key)) {
      fail(ErrorKind::Consistency, "test intent '" + ex.key.intent +
                                       "' is outside the classifier's label set");
    }
    if (model.predict(ex.text) == ex.key) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

namespace {

std::vector<std::string> document_tokens(const std::vector<std::string>& utterances) {
  std::vector<std::string> tokens;
  for (const std::string& utterance : utterances) {
    std::vector<std::string> words = tokenize_words(utterance);
    tokens.insert(tokens.end(), words.begin(), words.end());
  }
  return tokens;
}

size_t word_count(const std::string& utterance) {
  return tokenize_words(utterance).size();
}

}  // namespace

double distinct_n(const IntentDocuments& documents, int n) {
  if (n < 1) fail(ErrorKind::Argument, "n must be >= 1");
  if (documents.empty()) fail(ErrorKind::Argument, "no documents given");
  double total_ratio = 0.0;
  for (const auto& [intent, utterances] : documents) {
    if (utterances.empty()) {
      fail(ErrorKind::Argument, "intent '" + intent + "' has an empty document");
    }
    std::vector<std::string> tokens = document_tokens(utterances);
    if (tokens.empty()) {
      fail(ErrorKind::Argument, "intent '" + intent + "' has no words");
    }
    std::set<std::string> unique;
    if (tokens.size() >= static_cast<size_t>(n)) {
      for (size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (int k = 1; k < n; ++k) {
          gram.push_back('\x1f');
          gram += tokens[i + k];
        }
        unique.insert(std::move(gram));
      }
    }
    // Denominator is the total word count regardless of n.
    total_ratio += static_cast<double>(unique.size()) /
                   static_cast<double>(tokens.size());
  }
  return total_ratio / static_cast<double>(documents.size());
}

std::map<std::string, IntentDocuments> truncate_for_comparison(
    const std::map<std::string, IntentDocuments>& datasets, uint64_t seed) {
  if (datasets.empty()) fail(ErrorKind::Argument, "no datasets given");

  // All datasets must cover the same intents.
  const IntentDocuments& first = datasets.begin()->second;
  for (const auto& [dataset_id, docs] : datasets) {
    if (docs.size() != first.size()) {
      fail(ErrorKind::Consistency,
           "dataset '" + dataset_id + "' covers a different intent set");
    }
    for (const auto& [intent, utterances] : first) {
      if (!docs.count(intent)) {
        fail(ErrorKind::Consistency, "dataset '" + dataset_id +
                                         "' is missing intent '" + intent + "'");
      }
    }
  }

  // Per-intent budget: the smallest total word count over datasets.
  std::map<std::string, size_t> budgets;
  for (const auto& [intent, unused] : first) {
    size_t budget = SIZE_MAX;
    for (const auto& [dataset_id, docs] : datasets) {
      size_t total = 0;
      for (const std::string& utterance : docs.at(intent)) {
        total += word_count(utterance);
      }
      budget = std::min(budget, total);
    }
    budgets[intent] = budget;
  }

  std::map<std::string, IntentDocuments> out;
  for (const auto& [dataset_id, docs] : datasets) {
    IntentDocuments truncated;
    for (const auto& [intent, utterances] : docs) {
      const size_t budget = budgets.at(intent);
      std::vector<size_t> order(utterances.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      Rng rng(seed_stream(seed, "truncate", dataset_id, intent));
      rng.shuffle(order);

      std::vector<std::string> kept;
      size_t used = 0;
      for (size_t pick : order) {
        if (used == budget) break;
        const std::string& utterance = utterances[pick];
        std::vector<std::string> words = tokenize_words(utterance);
        if (words.empty()) continue;
        if (used + words.size() <= budget) {
          kept.push_back(utterance);
          used += words.size();
        } else {
          const size_t remaining = budget - used;
          words.resize(remaining);
          kept.push_back(join(words, " "));
          used = budget;
        }
      }
      truncated[intent] = std::move(kept);
    }
    out[dataset_id] = std::move(truncated);
  }
  return out;
}

TTestResult paired_t_test_one_tail(std::span<const double> a,
                                   std::span<const double> b, double alpha) {
  if (a.size() != b.size()) fail(ErrorKind::Argument, "paired samples differ in length");
  if (a.size() < 2) fail(ErrorKind::Argument, "paired t-test needs at least 2 pairs");

  std::vector<double> diffs(a.size());
  for (size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
  const double d_mean = mean(diffs);
  const double d_sd = sample_stddev(diffs);

  TTestResult result;
  if (d_sd == 0.0) {
    if (d_mean == 0.0) {
      result.t_statistic = 0.0;
      result.p_value = 0.5;
    } else {
      result.t_statistic = d_mean > 0.0
                               ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
      result.p_value = d_mean > 0.0 ? 0.0 : 1.0;
    }
  } else {
    const double n = static_cast<double>(diffs.size());
    result.t_statistic = d_mean / (d_sd / std::sqrt(n));
    result.p_value = student_t_sf(result.t_statistic, n - 1.0);
  }
  result.significant = result.p_value < alpha;
  return result;
}

ordered_json TrialReport::to_json() const {
  ordered_json j;
  j["trial_id"] = trial_id;
  j["strategy"] = strategy_id;
  j["accuracy"] = accuracy;
  j["distinct1"] = distinct1;
  j["distinct2"] = distinct2;
  j["n_train_utterances"] = n_train_utterances;
  return j;
}

TrialReport TrialReport::from_json(const json& j) {
  TrialReport r;
  r.trial_id = j.at("trial_id").get<int>();
  r.strategy_id = j.at("strategy").get<std::string>();
  r.accuracy = j.at("accuracy").get<double>();
  r.distinct1 = j.at("distinct1").get<double>();
  r.distinct2 = j.at("distinct2").get<double>();
  r.n_train_utterances = j.at("n_train_utterances").get<int>();
  return r;
}

AggregateReport aggregate_trials(const std::vector<TrialReport>& reports) {
  if (reports.empty()) fail(ErrorKind::Argument, "no trial reports to aggregate");

  std::map<std::string, std::vector<TrialReport>> by_strategy;
  std::vector<std::string> strategy_order;
  for (const TrialReport& r : reports) {
    if (!by_strategy.count(r.strategy_id)) strategy_order.push_back(r.strategy_id);
    by_strategy[r.strategy_id].push_back(r);
  }

  AggregateReport out;
  for (const std::string& strategy : strategy_order) {
    std::vector<TrialReport>& rs = by_strategy[strategy];
    std::sort(rs.begin(), rs.end(),
              [](const TrialReport& x, const TrialReport& y) {
                return x.trial_id < y.trial_id;
              });
    std::vector<double> acc, d1, d2, ntrain;
    for (const TrialReport& r : rs) {
      acc.push_back(r.accuracy);
      d1.push_back(r.distinct1);
      d2.push_back(r.distinct2);
      ntrain.push_back(static_cast<double>(r.n_train_utterances));
    }
    StrategyAggregate agg;
    agg.strategy_id = strategy;
    agg.n_trials = static_cast<int>(rs.size());
    agg.single_trial = rs.size() == 1;
    agg.accuracy_mean = mean(acc);
    agg.accuracy_stddev = sample_stddev(acc);
    agg.distinct1_mean = mean(d1);
    agg.distinct1_stddev = sample_stddev(d1);
    agg.distinct2_mean = mean(d2);
    agg.distinct2_stddev = sample_stddev(d2);
    agg.mean_train_utterances = mean(ntrain);
    out.strategies.push_back(agg);
  }

  // Refined vs every other strategy, paired on common trial ids.
  if (by_strategy.count("refined")) {
    const std::vector<TrialReport>& refined = by_strategy["refined"];
    for (const std::string& strategy : strategy_order) {
      if (strategy == "refined") continue;
      const std::vector<TrialReport>& baseline = by_strategy[strategy];
      std::map<int, double> base_by_trial;
      for (const TrialReport& r : baseline) base_by_trial[r.trial_id] = r.accuracy;
      std::vector<double> a, b;
      for (const TrialReport& r : refined) {
        auto it = base_by_trial.find(r.trial_id);
        if (it != base_by_trial.end()) {
          a.push_back(r.accuracy);
          b.push_back(it->second);
        }
      }
      if (a.size() >= 2) {
        SignificanceEntry entry;
        entry.better = "refined";
        entry.baseline = strategy;
        entry.accuracy_test = paired_t_test_one_tail(a, b, 0.05);
        out.significance.push_back(entry);
      }
    }
  }
  return out;
}

ordered_json AggregateReport::to_json() const {
  ordered_json j;
  j["strategies"] = ordered_json::array();
  for (const StrategyAggregate& s : strategies) {
    ordered_json e;
    e["strategy"] = s.strategy_id;
    e["n_trials"] = s.n_trials;
    e["single_trial"] = s.single_trial;
    e["accuracy_mean"] = s.accuracy_mean;
    e["accuracy_stddev"] = s.accuracy_stddev;
    e["distinct1_mean"] = s.distinct1_mean;
    e["distinct1_stddev"] = s.distinct1_stddev;
    e["distinct2_mean"] = s.distinct2_mean;
    e["distinct2_stddev"] = s.distinct2_stddev;
    e["mean_train_utterances"] = s.mean_train_utterances;
    j["strategies"].push_back(e);
  }
  j["significance"] = ordered_json::array();
  for (const SignificanceEntry& s : significance) {
    ordered_json e;
    e["better"] = s.better;
    e["baseline"] = s.baseline;
    e["t_statistic"] = s.accuracy_test.t_statistic;
    e["p_value"] = s.accuracy_test.p_value;
    e["significant"] = s.accuracy_test.significant;
    j["significance"].push_back(e);
  }
  return j;
}

std::string format_report_table(const AggregateReport& report) {
  std::set<std::string> significant_vs_all;
  for (const SignificanceEntry& e : report.significance) {
    if (e.accuracy_test.significant) significant_vs_all.insert(e.better);
  }
  // Marked only when refined beats every tested baseline.
  for (const SignificanceEntry& e : report.significance) {
    if (!e.accuracy_test.significant) significant_vs_all.erase(e.better);
  }

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-14s %-10s %-10s %s\n", "strategy",
                "accuracy", "dist-1", "dist-2", "train size");
  out << line;
  for (const StrategyAggregate& s : report.strategies) {
    char acc[48];
    std::snprintf(acc, sizeof(acc), "%.1f (%.1f)%s", 100.0 * s.accuracy_mean,
                  100.0 * s.accuracy_stddev,
                  significant_vs_all.count(s.strategy_id) ? "**" : "");
    std::snprintf(line, sizeof(line), "%-12s %-14s %-10.3f %-10.3f %.0f\n",
                  s.strategy_id.c_str(), acc, s.distinct1_mean, s.distinct2_mean,
                  s.mean_train_utterances);
    out << line;
  }
  if (!significant_vs_all.empty()) {
    out << "** better than every baseline at alpha = 0.05 (one-tail paired t-test)\n";
  }
  return out.str();
}

}  // namespace intentsynth
