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

#ifndef INTENTSYNTH_SPLITTER_HPP
#define INTENTSYNTH_SPLITTER_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"

namespace intentsynth {

// One trial's seeded partition of the domain inventory into unseen /
// seen-train / seen-validation. Intent sets derive from domain membership, so
// seen and unseen intents never overlap.
struct ExperimentPlan {
  int trial_id = 0;
  uint64_t seed = 0;
  std::set<std::string> unseen_domains;
  std::set<std::string> seen_train_domains;
  std::set<std::string> seen_val_domains;
  int per_intent_generation_count = 100;

  std::set<std::string> seen_domains() const;

  bool operator==(const ExperimentPlan&) const = default;

  nlohmann::ordered_json to_json() const;
  static ExperimentPlan from_json(const nlohmann::json& j);
};

// Per-trial data routed by domain membership.
//   seen_train  - training examples from every seen domain (train + validation
//                 domains); the pool for refiner pairs and the monitor classifier
//   seen_val    - the validation domains' slice of that pool
//   unseen_test - human test examples of the unseen domains
struct TrialBundle {
  ExperimentPlan plan;
  Corpus seen_train;
  Corpus seen_val;
  Corpus unseen_test;
  std::vector<IntentKey> unseen_intents;
};

// Generic protocol: draw n_unseen unseen domains, then shuffle the remainder
// on the same seed stream and take the first n_val as validation domains.
// Distinct trials get distinct unseen sets when the inventory allows it.
std::vector<ExperimentPlan> plan_trials(const std::vector<std::string>& domains,
                                        size_t n_unseen, size_t n_val,
                                        int per_intent_generation_count,
                                        uint64_t seed, int n_trials);

// 10 domains -> 5 unseen / 4 seen-train / 1 seen-validation, 100 per intent.
std::vector<ExperimentPlan> plan_clinc150_trials(uint64_t seed, int n_trials);

// 20 domains -> 8 unseen / 9 seen-train / 3 seen-validation, 200 per intent.
std::vector<ExperimentPlan> plan_sgd_trials(uint64_t seed, int n_trials);

TrialBundle materialize_trial(const ExperimentPlan& plan, const Corpus& corpus);

}  // namespace intentsynth

#endif  // INTENTSYNTH_SPLITTER_HPP
